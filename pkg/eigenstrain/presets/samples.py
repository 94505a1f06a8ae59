"""Named sample and material presets."""

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog

from eigenstrain.errors import ConfigurationError


@dataclass(frozen=True)
class SamplePreset:
    """Material constants and geometry for a named specimen."""

    name: str
    description: str = ""
    geometry: str = "material"

    youngs_modulus_gpa: float = 130.0
    poisson_ratio: float = 0.34

    # cylinder sections
    radius_mm: Optional[float] = None

    # cubes measured on a regular grid
    half_size_mm: Optional[float] = None
    grid_points: Optional[int] = None
    grid_inset_mm: Optional[float] = None
    z_order: Optional[int] = None
    plane_terms: Optional[int] = None

    def config_values(self) -> Dict[str, Any]:
        """Preset values keyed by run-configuration field name, unset ones omitted."""
        values = {}
        for item in fields(self):
            if item.name in ("name", "description", "geometry"):
                continue
            value = getattr(self, item.name)
            if value is not None:
                values[item.name] = value
        return values

    def grid_coordinates_mm(self) -> List[float]:
        """Evenly spaced grid coordinates along one axis, inset from both faces."""
        if self.half_size_mm is None or self.grid_points is None:
            raise ConfigurationError(f"Preset '{self.name}' has no measurement grid")
        inset = self.grid_inset_mm or 0.0
        start = -self.half_size_mm + inset
        stop = self.half_size_mm - inset
        if self.grid_points == 1:
            return [0.0]
        step = (stop - start) / (self.grid_points - 1)
        return [start + k * step for k in range(self.grid_points)]


logger = structlog.get_logger()
PRESET_FILE = Path(__file__).with_name("sample_presets.json")


DEFAULT_PRESETS = {
    "bronze": {"youngs_modulus_gpa": 130.0, "poisson_ratio": 0.34},
    "inconel": {"youngs_modulus_gpa": 208.0, "poisson_ratio": 0.28},
    "probe-1": {"geometry": "cylinder", "youngs_modulus_gpa": 130.0, "poisson_ratio": 0.34, "radius_mm": 1.5},
    "probe-2": {"geometry": "cylinder", "youngs_modulus_gpa": 130.0, "poisson_ratio": 0.34, "radius_mm": 1.1},
    "probe-3": {"geometry": "cylinder", "youngs_modulus_gpa": 130.0, "poisson_ratio": 0.34, "radius_mm": 1.1},
    "probe-4": {"geometry": "cylinder", "youngs_modulus_gpa": 130.0, "poisson_ratio": 0.34, "radius_mm": 0.8},
    "am-cube": {
        "geometry": "cube",
        "youngs_modulus_gpa": 208.0,
        "poisson_ratio": 0.28,
        "half_size_mm": 8.5,
        "grid_points": 8,
        "grid_inset_mm": 1.0,
        "z_order": 3,
        "plane_terms": 4,
    },
}


def _load_presets() -> Dict[str, Dict[str, Any]]:
    """Load preset definitions from JSON, falling back to defaults if needed."""
    if PRESET_FILE.exists():
        try:
            with PRESET_FILE.open("r", encoding="utf-8") as preset_file:
                data = json.load(preset_file)
                if isinstance(data, dict):
                    return data
                logger.warning(
                    "Sample preset file is malformed; expected object.",
                    path=str(PRESET_FILE),
                )
        except Exception as exc:
            logger.warning(
                "Failed to load sample presets; falling back to defaults.",
                path=str(PRESET_FILE),
                error=str(exc),
            )
    return {name: dict(values) for name, values in DEFAULT_PRESETS.items()}


def _build_presets() -> Dict[str, SamplePreset]:
    """Construct SamplePreset objects from preset data."""
    presets = _load_presets()
    allowed_fields = {item.name for item in fields(SamplePreset)}

    built: Dict[str, SamplePreset] = {}
    for name, preset_data in presets.items():
        if not isinstance(preset_data, dict):
            logger.warning("Skipping sample preset due to invalid structure.", preset=name)
            continue
        kwargs = {"name": name}
        for key, value in preset_data.items():
            if key in allowed_fields and key != "name":
                kwargs[key] = value
        built[name] = SamplePreset(**kwargs)

    return built


class PresetManager:
    """Registry of named sample presets."""

    PRESETS: Dict[str, SamplePreset] = _build_presets()

    @classmethod
    def get_preset(cls, name: str) -> SamplePreset:
        """Get a preset by name."""
        if name not in cls.PRESETS:
            raise ConfigurationError(
                f"Unknown preset '{name}'",
                available=sorted(cls.PRESETS),
            )
        return cls.PRESETS[name]

    @classmethod
    def register_preset(cls, preset: SamplePreset):
        """Register a custom preset."""
        cls.PRESETS[preset.name] = preset

    @classmethod
    def list_presets(cls) -> List[str]:
        """List all available presets."""
        return sorted(cls.PRESETS)

    @classmethod
    def cylinder_presets(cls) -> List[SamplePreset]:
        """All presets describing cylinder sections, in name order."""
        return [cls.PRESETS[name] for name in cls.list_presets() if cls.PRESETS[name].geometry == "cylinder"]


def get_preset(name: str) -> SamplePreset:
    """Get a named preset."""
    return PresetManager.get_preset(name)
