"""Configuration management for the eigenstrain toolkit."""

import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Type

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from eigenstrain.constants import (
    DEFAULT_ASSEMBLY_CHUNK,
    DEFAULT_CG_MAX_ITER_FACTOR,
    DEFAULT_CG_RTOL,
    DEFAULT_D0_ORDER,
    DEFAULT_DIAGNOSTICS_GRID,
    DEFAULT_LOG_LEVEL,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_PLANE_TERMS,
    DEFAULT_POLY_ORDER,
    DEFAULT_RAY_STEP_FRACTION,
    DEFAULT_SVD_RCOND,
    DEFAULT_Z_ORDER,
    LM_MAX_ITERATIONS,
)
from eigenstrain.errors import ConfigurationError, DataError
from eigenstrain.presets import get_preset

logger = structlog.get_logger()


class Settings(BaseSettings):
    """Process-wide settings read from the environment and an optional .env file."""

    model_config = SettingsConfigDict(
        env_prefix="EIGENSTRAIN_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging Configuration
    LOG_LEVEL: str = DEFAULT_LOG_LEVEL
    JSON_LOGS: bool = False
    LOG_FILE: Optional[str] = None

    # Output Configuration
    OUTPUT_DIR: str = DEFAULT_OUTPUT_DIR

    # Solver Configuration
    CG_RTOL: float = DEFAULT_CG_RTOL
    CG_MAX_ITER_FACTOR: int = DEFAULT_CG_MAX_ITER_FACTOR
    ASSEMBLY_CHUNK_CELLS: int = DEFAULT_ASSEMBLY_CHUNK

    # Fitting Configuration
    SVD_RCOND: float = DEFAULT_SVD_RCOND
    LM_MAX_ITERATIONS: int = LM_MAX_ITERATIONS

    def validate_configuration(self) -> bool:
        """Validate settings, logging every problem found."""
        errors = []

        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"LOG_LEVEL must be a logging level name, got {self.LOG_LEVEL}")

        if not (0.0 < self.CG_RTOL < 1.0):
            errors.append("CG_RTOL must be between 0 and 1")

        if self.CG_MAX_ITER_FACTOR <= 0:
            errors.append("CG_MAX_ITER_FACTOR must be positive")

        if self.ASSEMBLY_CHUNK_CELLS <= 0:
            errors.append("ASSEMBLY_CHUNK_CELLS must be positive")

        if not (0.0 <= self.SVD_RCOND < 1.0):
            errors.append("SVD_RCOND must be in [0, 1)")

        if self.LM_MAX_ITERATIONS <= 0:
            errors.append("LM_MAX_ITERATIONS must be positive")

        if errors:
            for error in errors:
                logger.error("Configuration validation error", error=error)
            return False

        logger.debug("Configuration validation passed")
        return True


try:
    settings = Settings()

    if not settings.validate_configuration():
        logger.warning("Configuration validation failed - falling back to defaults where values are unusable")
except Exception as e:
    sys.stderr.write(f"ERROR: Failed to load configuration: {str(e)}\n")
    raise


def _physical_errors(config: "RunConfig") -> List[str]:
    errors = []
    if not config.youngs_modulus_gpa > 0.0:
        errors.append(f"youngs_modulus_gpa must be positive, got {config.youngs_modulus_gpa}")
    if not -1.0 < config.poisson_ratio < 0.5:
        errors.append(f"poisson_ratio must lie in (-1, 0.5), got {config.poisson_ratio}")
    return errors


class RunConfig(BaseModel):
    """Parameters shared by every subcommand."""

    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = Field(None, description="Named sample preset applied before the config file")
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR, description="Directory for artifacts")
    youngs_modulus_gpa: float = Field(130.0, description="Young's modulus in GPa")
    poisson_ratio: float = Field(0.34, description="Poisson's ratio")
    stamp: bool = Field(False, description="Embed timestamps in SVG output")

    def extra_errors(self) -> List[str]:
        """Subcommand-specific validation, one message per problem."""
        return []

    @model_validator(mode="after")
    def _validate_physics(self):
        errors = _physical_errors(self) + self.extra_errors()
        if errors:
            raise ValueError("; ".join(errors))
        return self

    def elastic_model(self):
        from eigenstrain.tensor_core import ElasticModel

        return ElasticModel.from_gpa(self.youngs_modulus_gpa, self.poisson_ratio)

    def echo(self) -> Dict[str, Any]:
        """Configuration as plain JSON values, for embedding in artifacts."""
        return self.model_dump(mode="json")


class AxisymConfig(RunConfig):
    radius_mm: float = Field(1.5, description="Cylinder radius in mm")
    order: int = Field(DEFAULT_POLY_ORDER, description="Coefficient count l per component")

    def extra_errors(self) -> List[str]:
        errors = []
        if not self.radius_mm > 0.0:
            errors.append(f"radius_mm must be positive, got {self.radius_mm}")
        if self.order < 2:
            errors.append(f"order must be at least 2, got {self.order}")
        return errors


class AxisymForwardConfig(AxisymConfig):
    """Synthetic cylinder profile from eigenstrain coefficients in normalized radius."""

    f: List[float] = Field(default_factory=lambda: [1.0e-3, 0.0, 0.0, 0.0, -1.0e-3])
    g: List[float] = Field(default_factory=lambda: [5.0e-3, 0.0, 0.0, 0.0, -1.0e-3])
    h: List[float] = Field(default_factory=lambda: [0.0] * DEFAULT_POLY_ORDER)
    n_points: int = 31
    span_diameter: bool = True
    noise_mpa: float = 0.0
    uncertainty_mpa: Optional[float] = None
    seed: int = 0
    d0_ref_angstrom: Optional[float] = Field(None, description="Write a lattice-spacing file with this reference")
    d0_coefficients: List[float] = Field(default_factory=list, description="d0(r) coefficients in (r/R)^j, Angstrom")

    def extra_errors(self) -> List[str]:
        errors = super().extra_errors()
        for name in ("f", "g", "h"):
            values = getattr(self, name)
            if len(values) != self.order:
                errors.append(f"{name} needs {self.order} coefficients, got {len(values)}")
        if self.n_points < 1:
            errors.append("n_points must be positive")
        if self.noise_mpa < 0.0:
            errors.append("noise_mpa must be non-negative")
        if self.d0_ref_angstrom is not None and self.d0_ref_angstrom <= 0.0:
            errors.append("d0_ref_angstrom must be positive")
        return errors


class AxisymFitConfig(AxisymConfig):
    profile: str = Field("profile.csv", description="Stress profile CSV")
    exclude_null: bool = True
    zero_linear: bool = False
    weighted: bool = True
    n_plot: int = 200

    def extra_errors(self) -> List[str]:
        errors = super().extra_errors()
        if self.zero_linear and self.order < 3:
            errors.append("zero_linear needs order >= 3")
        return errors


class AxisymFitD0Config(AxisymFitConfig):
    lattice: str = Field("lattice.csv", description="Lattice spacing CSV")
    d0_ref_angstrom: float = Field(3.6, description="Reference spacing used for the initial strains")
    d0_order: int = DEFAULT_D0_ORDER

    def extra_errors(self) -> List[str]:
        errors = super().extra_errors()
        if self.d0_ref_angstrom <= 0.0:
            errors.append("d0_ref_angstrom must be positive")
        if self.d0_order < 0:
            errors.append("d0_order must be non-negative")
        return errors


class CubeConfig(RunConfig):
    youngs_modulus_gpa: float = 208.0
    poisson_ratio: float = 0.28
    half_size_mm: float = 8.5
    z_order: int = DEFAULT_Z_ORDER
    plane_terms: int = DEFAULT_PLANE_TERMS

    def extra_errors(self) -> List[str]:
        errors = []
        if not self.half_size_mm > 0.0:
            errors.append(f"half_size_mm must be positive, got {self.half_size_mm}")
        if self.z_order < 1 or self.plane_terms < 1:
            errors.append("z_order and plane_terms must be at least 1")
        return errors


class CubeFitConfig(CubeConfig):
    grid: str = Field("grid.csv", description="Stress sample CSV")
    weighted: bool = True
    diagnostics_grid: int = DEFAULT_DIAGNOSTICS_GRID
    field_cells: int = Field(16, description="Cells per axis of the fitted-field dump")
    heatmap_resolution: int = 65

    def extra_errors(self) -> List[str]:
        errors = super().extra_errors()
        if self.diagnostics_grid < 4:
            errors.append("diagnostics_grid must be at least 4")
        if self.field_cells < 2:
            errors.append("field_cells must be at least 2")
        if self.heatmap_resolution < 2:
            errors.append("heatmap_resolution must be at least 2")
        return errors


class DecomposeConfig(RunConfig):
    youngs_modulus_gpa: float = 208.0
    poisson_ratio: float = 0.28
    field: str = Field("fitted_stress.csv", description="Stress field dump")
    weight: Literal["identity", "stiffness"] = "stiffness"


class LrtSimConfig(RunConfig):
    youngs_modulus_gpa: float = 208.0
    poisson_ratio: float = 0.28
    field: str = Field("fitted_stress.csv", description="Strain or stress field dump")
    directions: List[List[float]] = Field(
        default_factory=lambda: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
    )
    detector_pixels: int = 32
    pixel_pitch_mm: Optional[float] = None
    method: Literal["trapezoid", "segment"] = "trapezoid"
    step_fraction: float = DEFAULT_RAY_STEP_FRACTION

    def extra_errors(self) -> List[str]:
        errors = []
        if not self.directions:
            errors.append("directions must not be empty")
        if any(len(d) != 3 for d in self.directions):
            errors.append("every direction needs three components")
        elif any(not any(d) for d in self.directions):
            errors.append("directions must be non-zero")
        if self.detector_pixels < 1:
            errors.append("detector_pixels must be positive")
        if self.pixel_pitch_mm is not None and self.pixel_pitch_mm <= 0.0:
            errors.append("pixel_pitch_mm must be positive")
        if not 0.0 < self.step_fraction <= 1.0:
            errors.append("step_fraction must be in (0, 1]")
        return errors


class LinkCheckConfig(CubeConfig):
    resolutions: List[int] = Field(default_factory=lambda: [8, 16])
    coefficients: Optional[str] = Field(None, description="Cube-fit report supplying the potential")
    seed: int = 0
    stress_scale_mpa: float = 300.0
    contamination: float = 1.0e-3
    n_rays: int = 64

    def extra_errors(self) -> List[str]:
        errors = super().extra_errors()
        if not self.resolutions or any(n < 2 for n in self.resolutions):
            errors.append("resolutions must list cell counts of at least 2")
        if self.n_rays < 1:
            errors.append("n_rays must be positive")
        return errors


RUN_CONFIGS: Dict[str, Type[RunConfig]] = {
    "axisym-forward": AxisymForwardConfig,
    "axisym-fit": AxisymFitConfig,
    "axisym-fit-d0": AxisymFitD0Config,
    "cube-fit": CubeFitConfig,
    "decompose": DecomposeConfig,
    "lrt-sim": LrtSimConfig,
    "link-check": LinkCheckConfig,
}


def _read_config_file(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise DataError(f"Config file not found: {path}", path=str(path))
    try:
        with path.open("rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"Malformed config file {path}: {exc}", path=str(path))


def _normalize_keys(values: Dict[str, Any]) -> Dict[str, Any]:
    return {key.replace("-", "_"): value for key, value in values.items()}


def load_run_config(
    subcommand: str,
    config_file: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Resolve the run configuration of a subcommand.

    Values are layered from lowest to highest precedence: model defaults,
    the named preset, the ``[common]`` table, the subcommand's own table and
    finally command-line overrides.

    Args:
        subcommand: Subcommand name
        config_file: Optional TOML file
        overrides: ``--key=value`` overrides, already decoded

    Returns:
        Validated configuration

    Raises:
        ConfigurationError: On unknown subcommands, presets or invalid values
        DataError: If the config file does not exist
    """
    if subcommand not in RUN_CONFIGS:
        raise ConfigurationError(f"Unknown subcommand '{subcommand}'", available=sorted(RUN_CONFIGS))
    config_cls = RUN_CONFIGS[subcommand]

    file_data = _read_config_file(Path(config_file)) if config_file else {}
    # [common] may hold keys meant for other subcommands
    common = {
        key: value
        for key, value in _normalize_keys(file_data.get("common", {})).items()
        if key in config_cls.model_fields
    }
    section = _normalize_keys(file_data.get(subcommand, {}))
    overrides = _normalize_keys(overrides or {})

    preset_name = overrides.get("preset", section.get("preset", common.get("preset")))
    merged: Dict[str, Any] = {}
    if preset_name:
        preset_values = get_preset(preset_name).config_values()
        merged.update({k: v for k, v in preset_values.items() if k in config_cls.model_fields})
    merged.update(common)
    merged.update(section)
    merged.update(overrides)

    try:
        config = config_cls.model_validate(merged)
    except ValidationError as exc:
        problems = [f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()]
        raise ConfigurationError(
            f"Invalid configuration for {subcommand}: " + "; ".join(problems),
            subcommand=subcommand,
            problems=problems,
        )

    logger.debug("Resolved run configuration", subcommand=subcommand, preset=preset_name)
    return config
