"""Artifact store interface for abstracting where run outputs go."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict

from pydantic import BaseModel


class IArtifactStore(ABC):
    """Abstract interface for run artifact storage."""

    @abstractmethod
    def write_text(self, name: str, text: str) -> Path:
        """
        Write a text artifact.

        Args:
            name: File name relative to the store root
            text: Content

        Returns:
            Path of the written file
        """
        pass

    @abstractmethod
    def write_bytes(self, name: str, data: bytes) -> Path:
        """
        Write a binary artifact.

        Args:
            name: File name relative to the store root
            data: Content

        Returns:
            Path of the written file
        """
        pass

    @abstractmethod
    def write_report(self, name: str, report: BaseModel) -> Path:
        """
        Write a report model as deterministic JSON.

        Args:
            name: File name relative to the store root
            report: Pydantic report model

        Returns:
            Path of the written file
        """
        pass

    @abstractmethod
    def path_for(self, name: str) -> Path:
        """
        Resolve an artifact name inside the store.

        Args:
            name: File name relative to the store root

        Returns:
            Absolute path under the root
        """
        pass

    @abstractmethod
    def manifest(self) -> Dict[str, str]:
        """
        Artifacts written so far.

        Returns:
            Mapping of artifact name to SHA-256 digest
        """
        pass
