"""Eigenstrain reconstruction of residual stress fields."""

from eigenstrain.constants import TOOL_VERSION as __version__

__all__ = ["__version__"]
