"""File-system artifact store for run outputs."""

import hashlib
from pathlib import Path
from typing import Dict, Optional

import structlog
from pydantic import BaseModel

from eigenstrain.config import settings
from eigenstrain.errors import DataError
from eigenstrain.interfaces.artifacts import IArtifactStore
from eigenstrain.utils import dumps_deterministic

logger = structlog.get_logger()


class FileArtifactStore(IArtifactStore):
    """Writes artifacts below one output directory and records their digests."""

    def __init__(self, root: Optional[str] = None):
        """
        Initialize the store.

        Args:
            root: Output directory, created on demand; the configured default if None
        """
        self.root = Path(root or settings.OUTPUT_DIR).resolve()
        self._written: Dict[str, str] = {}

    def path_for(self, name: str) -> Path:
        path = (self.root / name).resolve()
        if path != self.root and self.root not in path.parents:
            raise DataError(f"Artifact '{name}' would be written outside {self.root}", name=name)
        return path

    def write_bytes(self, name: str, data: bytes) -> Path:
        path = self.path_for(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        except OSError as e:
            raise DataError(f"Could not write artifact {path}: {e}", path=str(path))
        self._written[name] = hashlib.sha256(data).hexdigest()
        logger.debug("Artifact written", artifact=name, size=len(data))
        return path

    def write_text(self, name: str, text: str) -> Path:
        return self.write_bytes(name, text.encode("utf-8"))

    def write_report(self, name: str, report: BaseModel) -> Path:
        return self.write_text(name, dumps_deterministic(report.model_dump(mode="json")))

    def manifest(self) -> Dict[str, str]:
        return dict(sorted(self._written.items()))


def create_artifact_store(store_type: str = "file", **kwargs) -> IArtifactStore:
    """
    Create an artifact store.

    Args:
        store_type: Type of store (currently only "file")
        **kwargs: Store-specific parameters

    Returns:
        IArtifactStore implementation

    Raises:
        ValueError: If the store type is not supported
    """
    if store_type == "file":
        return FileArtifactStore(**kwargs)
    raise ValueError(f"Unsupported artifact store type: {store_type}")
