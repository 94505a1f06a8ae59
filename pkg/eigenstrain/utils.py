"""Utility helpers shared across the toolkit."""

import hashlib
import json
import time
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import structlog

logger = structlog.get_logger()

PathLike = Union[str, Path]


def format_error_message(error: Exception, context: str = "") -> str:
    """
    Format an error message with context for logging.

    Args:
        error: The exception to format
        context: Additional context about where the error occurred

    Returns:
        Formatted error message
    """
    error_type = type(error).__name__
    error_msg = str(error)

    if context:
        return f"[{context}] {error_type}: {error_msg}"
    return f"{error_type}: {error_msg}"


def missing_fields(available: Iterable[str], required_fields: List[str]) -> List[str]:
    """
    List required field names that are absent.

    Args:
        available: Field names present (e.g. CSV header columns)
        required_fields: Field names that must be present

    Returns:
        The missing names, in the order they were required
    """
    present = set(available)
    return [field for field in required_fields if field not in present]


def file_sha256(path: PathLike) -> str:
    """SHA-256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def dumps_deterministic(data: Dict[str, Any]) -> str:
    """
    Serialize a JSON document byte-reproducibly.

    Keys are sorted, indentation is fixed and floats use the shortest
    representation that round-trips exactly.
    """
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=True) + "\n"


def parse_override(raw: str) -> Any:
    """
    Parse a command-line override value.

    JSON literals (numbers, booleans, lists, null) are decoded; anything else
    is kept as a string.
    """
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


class Timer:
    """Context manager for timing operations."""

    def __init__(self, name: str = "Operation", **context: Any):
        """
        Initialize timer.

        Args:
            name: Name of the operation being timed
            **context: Extra key-value pairs logged with the duration
        """
        self.name = name
        self.context = context
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None

    def __enter__(self):
        """Start the timer."""
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Stop the timer and log the duration."""
        self.end_time = time.perf_counter()
        logger.debug(
            "Timed operation finished",
            operation=self.name,
            seconds=round(self.end_time - self.start_time, 4),
            **self.context,
        )

    @property
    def elapsed(self) -> float:
        """Get elapsed time."""
        if self.start_time is None:
            return 0.0
        if self.end_time is None:
            return time.perf_counter() - self.start_time
        return self.end_time - self.start_time
