"""Named sample and material presets."""

from eigenstrain.presets.samples import PresetManager, SamplePreset, get_preset

__all__ = ["PresetManager", "SamplePreset", "get_preset"]
