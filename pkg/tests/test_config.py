"""Tests for settings, presets and run configuration layering."""

import pytest

from eigenstrain.config import AxisymFitConfig, CubeFitConfig, Settings, load_run_config
from eigenstrain.errors import ConfigurationError, DataError
from eigenstrain.presets import PresetManager, get_preset


def write_config(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


def test_defaults_without_file():
    """Model defaults apply when nothing else is given."""
    config = load_run_config("axisym-fit")
    assert isinstance(config, AxisymFitConfig)
    assert config.youngs_modulus_gpa == 130.0
    assert config.exclude_null is True


def test_layering_precedence(tmp_path):
    """Preset < [common] < subcommand table < overrides."""
    path = write_config(
        tmp_path,
        """
[common]
preset = "probe-2"
poisson_ratio = 0.3
n_rays = 5

[axisym-fit]
order = 6
radius-mm = 1.0
""",
    )
    config = load_run_config("axisym-fit", path, {"order": 7})
    assert config.youngs_modulus_gpa == 130.0
    assert config.poisson_ratio == 0.3
    assert config.radius_mm == 1.0
    assert config.order == 7
    assert config.preset == "probe-2"


def test_preset_fills_geometry():
    """Cube presets supply the basis truncation."""
    config = load_run_config("cube-fit", overrides={"preset": "am-cube"})
    assert isinstance(config, CubeFitConfig)
    assert (config.half_size_mm, config.z_order, config.plane_terms) == (8.5, 3, 4)


def test_unknown_subcommand():
    with pytest.raises(ConfigurationError):
        load_run_config("fit-everything")


def test_unknown_preset():
    with pytest.raises(ConfigurationError):
        load_run_config("axisym-fit", overrides={"preset": "granite"})


def test_missing_config_file(tmp_path):
    """A config file that does not exist is an I/O problem."""
    with pytest.raises(DataError):
        load_run_config("axisym-fit", str(tmp_path / "absent.toml"))


def test_malformed_config_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config("axisym-fit", write_config(tmp_path, "[axisym-fit\norder = 3"))


def test_unknown_key_is_rejected():
    """Misspelled keys fail instead of being ignored."""
    with pytest.raises(ConfigurationError) as excinfo:
        load_run_config("axisym-fit", overrides={"ordr": 4})
    assert "ordr" in str(excinfo.value)


@pytest.mark.parametrize(
    "subcommand, overrides",
    [
        ("axisym-fit", {"poisson_ratio": 0.5}),
        ("axisym-fit", {"youngs_modulus_gpa": -1.0}),
        ("axisym-fit", {"order": 1}),
        ("axisym-forward", {"order": 3}),
        ("lrt-sim", {"directions": [[0.0, 0.0, 0.0]]}),
        ("link-check", {"resolutions": [1]}),
        ("decompose", {"weight": "compliance"}),
    ],
)
def test_invalid_values(subcommand, overrides):
    """Physically meaningless or inconsistent values are usage errors."""
    with pytest.raises(ConfigurationError):
        load_run_config(subcommand, overrides=overrides)


def test_echo_is_plain_json():
    """The echoed configuration carries every resolved value."""
    echo = load_run_config("lrt-sim").echo()
    assert echo["method"] == "trapezoid"
    assert echo["directions"][0] == [1.0, 0.0, 0.0]


def test_settings_validation():
    """Out-of-range solver settings are reported."""
    assert Settings().validate_configuration()
    assert not Settings(CG_RTOL=2.0).validate_configuration()
    assert not Settings(LOG_LEVEL="LOUD").validate_configuration()


def test_presets():
    """Bundled presets load from JSON with their geometry."""
    assert "am-cube" in PresetManager.list_presets()
    assert [p.name for p in PresetManager.cylinder_presets()] == ["probe-1", "probe-2", "probe-3", "probe-4"]
    cube = get_preset("am-cube")
    coords = cube.grid_coordinates_mm()
    assert len(coords) == 8
    assert coords[0] == pytest.approx(-7.5)
    assert coords[-1] == pytest.approx(7.5)
    with pytest.raises(ConfigurationError):
        get_preset("bronze").grid_coordinates_mm()
