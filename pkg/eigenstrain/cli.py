"""Command-line entry point running one pipeline per subcommand."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import structlog

from eigenstrain.artifacts import create_artifact_store
from eigenstrain.axisym.d0 import fit_with_d0, lattice_stress, stress_uncertainty
from eigenstrain.axisym.field import AxisymPolyField, AxisymStressProfile, D0Poly
from eigenstrain.axisym.fitting import AxisymFitResult, FitOptions, fit_stress
from eigenstrain.axisym.forward import axial_force, equilibrium_residual, forward_stress
from eigenstrain.cli_io import csv_io, plotting
from eigenstrain.cli_io.fixtures import random_potential, sample_radii, synthetic_lattice, synthetic_profile
from eigenstrain.config import RUN_CONFIGS, RunConfig, load_run_config, settings
from eigenstrain.constants import EXIT_OK, EXIT_USAGE, MM, MPA, SUBCOMMANDS, TOOL_VERSION, VOIGT_LABELS
from eigenstrain.decomp import decompose_stress
from eigenstrain.errors import ConfigurationError, DataError, ErrorReporter, with_error_context
from eigenstrain.fem.fields import Convention, GridTensorField
from eigenstrain.fem.mesh import build_box_mesh
from eigenstrain.interfaces.artifacts import IArtifactStore
from eigenstrain.logging_config import LogContext, setup_logging
from eigenstrain.lrt import DetectorGeometry, run_link_check, simulate_projections
from eigenstrain.maxwell.fitting import ExtrapolationGuard, fit_stress_field, sample_field
from eigenstrain.maxwell.potential import MaxwellPotential, build_symmetric_basis, field_diagnostics
from eigenstrain.models import (
    Coefficient,
    ErrorPayload,
    FitReport,
    Provenance,
    ResidualSummary,
    RunReport,
    status_for,
)
from eigenstrain.tensor_core import apply_compliance
from eigenstrain.utils import Timer, file_sha256, format_error_message, parse_override

logger = structlog.get_logger()

CYLINDER_COMPONENTS = ["rr", "tt", "zz"]
PLOT_POINTS = 200


def _finite(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def _provenance(subcommand: str, config: RunConfig, inputs: Sequence[str] = ()) -> Provenance:
    return Provenance(
        subcommand=subcommand,
        config=config.echo(),
        inputs={Path(p).name: file_sha256(p) for p in inputs},
    )


def _residual_summary(residual: np.ndarray, components: List[str]) -> ResidualSummary:
    scaled = np.asarray(residual) / MPA
    return ResidualSummary(
        components=components,
        rms={c: float(np.sqrt(np.mean(scaled[:, k] ** 2))) for k, c in enumerate(components)},
        max={c: float(np.max(np.abs(scaled[:, k]))) for k, c in enumerate(components)},
        per_point=scaled.tolist(),
    )


def _coefficients(labels, values, errors=None) -> List[Coefficient]:
    errors = [None] * len(labels) if errors is None else [_finite(e) for e in errors]
    return [Coefficient(label=l, value=float(v), standard_error=e) for l, v, e in zip(labels, values, errors)]


def _axisym_fit_report(kind: str, fit: AxisymFitResult, diagnostics: Dict[str, Any], provenance: Provenance,
                       extra_coefficients: Sequence[Coefficient] = (), extra_warnings: Sequence[str] = ()) -> FitReport:
    warnings = list(fit.warnings) + [w for w in extra_warnings if w not in fit.warnings]
    f_hat, g_hat, h_hat = fit.field.normalized()
    diagnostics = dict(diagnostics)
    diagnostics["eigenstrain_normalized"] = {"f": f_hat.tolist(), "g": g_hat.tolist(), "h": h_hat.tolist()}
    diagnostics["rms_residual_mpa"] = fit.rms_residual / MPA
    return FitReport(
        kind=kind,
        status=status_for(warnings),
        coefficients=_coefficients(fit.labels, fit.parameters, fit.standard_errors) + list(extra_coefficients),
        residuals=_residual_summary(fit.residual, CYLINDER_COMPONENTS),
        rank=fit.rank,
        n_parameters=len(fit.labels),
        condition_number=_finite(fit.condition_number),
        weighted=fit.weighted,
        diagnostics=diagnostics,
        warnings=warnings,
        provenance=provenance,
    )


def _axisym_figure(field: AxisymPolyField, m, profile, title: str, n_plot: int = PLOT_POINTS):
    r_plot = np.linspace(0.0, field.radius, n_plot)
    return plotting.axisym_profile_figure(
        r_plot,
        forward_stress(field, m, r_plot).stress,
        field.evaluate(r_plot),
        np.abs(profile.r),
        profile.stress,
        profile.uncertainty,
        title,
    )


@with_error_context("axisym-forward")
def run_axisym_forward(config, store: IArtifactStore) -> str:
    m = config.elastic_model()
    R = config.radius_mm * MM
    field = AxisymPolyField.from_normalized(config.f, config.g, config.h, R)
    r = sample_radii(R, config.n_points, config.span_diameter)
    uncertainty = None if config.uncertainty_mpa is None else config.uncertainty_mpa * MPA
    profile = synthetic_profile(field, m, r, config.noise_mpa * MPA, uncertainty, config.seed)
    store.write_text("profile.csv", csv_io.profile_csv(profile))

    if config.d0_ref_angstrom is not None:
        c = config.d0_coefficients or [config.d0_ref_angstrom]
        lattice = synthetic_lattice(field, m, D0Poly(c, R, config.d0_ref_angstrom), r, seed=config.seed)
        store.write_text("lattice.csv", csv_io.lattice_csv(lattice))

    store.write_bytes("profile.svg", plotting.figure_svg(_axisym_figure(field, m, profile, "Forward profile"), config.stamp))

    r_check = np.linspace(0.0, R, PLOT_POINTS)[1:]
    results = {
        "axial_force_integral": axial_force(field, m),
        "max_equilibrium_residual_pa_per_m": float(np.max(np.abs(equilibrium_residual(field, m, r_check)))),
        "eigenstrain": {"f": list(field.f), "g": list(field.g), "h": list(field.h)},
    }
    report = RunReport(kind="axisym-forward", results=results, artifacts=store.manifest(),
                       provenance=_provenance("axisym-forward", config))
    store.write_report("forward_report.json", report)
    return f"Wrote {profile.n_points} samples to {store.path_for('profile.csv')}\n"


@with_error_context("axisym-fit")
def run_axisym_fit(config, store: IArtifactStore) -> str:
    m = config.elastic_model()
    R = config.radius_mm * MM
    profile = csv_io.parse_profile_csv(config.profile, R)
    options = FitOptions(config.exclude_null, config.zero_linear, config.weighted)
    fit = fit_stress(profile, config.order, m, options, R)

    report = _axisym_fit_report("axisym-fit", fit, {}, _provenance("axisym-fit", config, [config.profile]))
    store.write_bytes("fit.svg", plotting.figure_svg(_axisym_figure(fit.field, m, profile, "Axisymmetric fit", config.n_plot), config.stamp))
    store.write_report("fit_report.json", report)

    rows = [{"parameter": c.label, "value": c.value, "std_error": c.standard_error} for c in report.coefficients]
    return csv_io.table_text(rows, ["parameter", "value", "std_error"])


@with_error_context("axisym-fit-d0")
def run_axisym_fit_d0(config, store: IArtifactStore) -> str:
    m = config.elastic_model()
    R = config.radius_mm * MM
    lattice = csv_io.parse_lattice_csv(config.lattice, R)
    options = FitOptions(config.exclude_null, config.zero_linear, config.weighted)
    result = fit_with_d0(lattice, config.order, config.d0_order, m, config.d0_ref_angstrom, R, options)

    d0_coefficients = [Coefficient(label=f"d0[{j}]", value=float(c)) for j, c in enumerate(result.d0.c)]
    diagnostics = {
        "iterations": result.iterations,
        "converged": result.converged,
        "final_cost": result.final_cost,
        "d0_angstrom": list(np.asarray(result.d0.c, dtype=float)),
    }
    report = _axisym_fit_report(
        "axisym-fit-d0", result.fit, diagnostics, _provenance("axisym-fit-d0", config, [config.lattice]), d0_coefficients,
        result.warnings,
    )
    measured = AxisymStressProfile.from_array(
        lattice.r, lattice_stress(lattice, result.d0, m), stress_uncertainty(lattice, config.d0_ref_angstrom, m)
    )
    figure = _axisym_figure(result.fit.field, m, measured, "Fit with variable d0", config.n_plot)
    store.write_bytes("fit_d0.svg", plotting.figure_svg(figure, config.stamp))
    store.write_report("fit_d0_report.json", report)

    rows = [{"parameter": c.label, "value": c.value, "std_error": c.standard_error} for c in report.coefficients]
    return csv_io.table_text(rows, ["parameter", "value", "std_error"])


@with_error_context("cube-fit")
def run_cube_fit(config, store: IArtifactStore) -> str:
    L = config.half_size_mm * MM
    samples = csv_io.parse_grid_csv(config.grid, L)
    basis = build_symmetric_basis(config.z_order, config.plane_terms, L)
    fit = fit_stress_field(samples, basis, config.weighted)
    diagnostics = field_diagnostics(fit.potential, config.diagnostics_grid)

    mesh = build_box_mesh(L, config.field_cells)
    nodal, extrapolation = sample_field(fit.potential, mesh.nodes, ExtrapolationGuard(samples.points))
    store.write_text("fitted_stress.csv", csv_io.field_csv(GridTensorField(mesh, nodal, Convention.NODAL), "stress"))

    section = plotting.maxwell_section_figure(fit.potential, config.heatmap_resolution, 0, "Fitted stress, x = 0")
    store.write_bytes("section.svg", plotting.figure_svg(section, config.stamp))
    store.write_bytes("axis_profiles.svg", plotting.figure_svg(plotting.maxwell_axis_figure(fit.potential), config.stamp))

    warnings = list(fit.warnings) + extrapolation
    if not diagnostics.passed:
        warnings.append("Fitted field fails the divergence, traction or mean-stress diagnostics")
    report = FitReport(
        kind="cube-fit",
        status=status_for(warnings),
        coefficients=_coefficients(fit.labels, fit.coefficients, fit.standard_errors),
        residuals=_residual_summary(fit.residual, list(VOIGT_LABELS)),
        rank=fit.rank,
        n_parameters=len(fit.labels),
        condition_number=_finite(fit.condition_number),
        weighted=fit.weighted,
        diagnostics={
            "basis": {"half_size_m": L, "z_order": config.z_order, "plane_terms": config.plane_terms},
            "field": diagnostics.as_dict(),
        },
        warnings=warnings,
        provenance=_provenance("cube-fit", config, [config.grid]),
    )
    store.write_report("fit_report.json", report)

    rows = [{"component": c, "rms_mpa": report.residuals.rms[c], "max_mpa": report.residuals.max[c]}
            for c in VOIGT_LABELS]
    return csv_io.table_text(rows, ["component", "rms_mpa", "max_mpa"])


@with_error_context("decompose")
def run_decompose(config, store: IArtifactStore) -> str:
    m = config.elastic_model()
    sigma, kind = csv_io.parse_field_csv(config.field)
    if kind != "stress":
        raise DataError(f"{config.field} holds a strain field; decompose needs stress", path=config.field)
    result = decompose_stress(sigma, m, sigma.mesh, config.weight)

    store.write_text("trivial_eigenstrain.csv", csv_io.field_csv(result.trivial, "strain"))
    store.write_text("potential_eigenstrain.csv", csv_io.field_csv(result.potential, "strain"))
    store.write_text("solenoidal_eigenstrain.csv", csv_io.field_csv(result.solenoidal, "strain"))
    store.write_text("reconstructed_stress.csv", csv_io.field_csv(result.reconstructed_stress, "stress"))

    split = plotting.field_section_figure(
        [result.trivial, result.potential, result.solenoidal],
        ["trivial eps*_xx", "potential part", "solenoidal part"],
        component=0,
    )
    store.write_bytes("eigenstrain_split.svg", plotting.figure_svg(split, config.stamp))
    comparison = plotting.field_section_figure(
        [sigma, result.reconstructed_stress], ["input sigma_xx", "from solenoidal part"], component=0
    )
    store.write_bytes("reconstruction.svg", plotting.figure_svg(comparison, config.stamp))

    results = {"weight": result.weight, "reconstruction_error": result.reconstruction_error}
    results.update(result.report.as_dict())
    report = RunReport(
        kind="decompose",
        status=status_for(result.report.warnings),
        results=results,
        artifacts=store.manifest(),
        warnings=list(result.report.warnings),
        provenance=_provenance("decompose", config, [config.field]),
    )
    store.write_report("decomposition_report.json", report)
    rows = [{"quantity": k, "value": results[k]} for k in
            ("reconstruction_error", "orthogonality_residual", "l2_orthogonality_residual", "recomposition_error")]
    return csv_io.table_text(rows, ["quantity", "value"])


@with_error_context("lrt-sim")
def run_lrt_sim(config, store: IArtifactStore) -> str:
    field, kind = csv_io.parse_field_csv(config.field)
    if kind == "stress":
        m = config.elastic_model()
        field = field.map_values(lambda values: apply_compliance(values, m))
    if config.pixel_pitch_mm is None:
        geometry = DetectorGeometry.covering(field.mesh, config.detector_pixels)
    else:
        geometry = DetectorGeometry(config.detector_pixels, config.pixel_pitch_mm * MM)
    images = simulate_projections(field, geometry, config.directions, config.method, config.step_fraction)

    projections = []
    for k, image in enumerate(images):
        store.write_text(f"projection_{k}.csv", csv_io.projection_csv(image))
        store.write_bytes(f"projection_{k}.svg", plotting.figure_svg(plotting.projection_figure(image), config.stamp))
        projections.append({
            "index": k,
            "direction": image.direction.tolist(),
            "u_axis": image.u_axis.tolist(),
            "v_axis": image.v_axis.tolist(),
            "pixels_hit": int(np.count_nonzero(image.hit)),
        })
    results = {
        "source_kind": kind,
        "pixels": geometry.pixels,
        "pixel_pitch_mm": geometry.pixel_pitch / MM,
        "method": config.method,
        "projections": projections,
    }
    report = RunReport(kind="lrt-sim", results=results, artifacts=store.manifest(),
                       provenance=_provenance("lrt-sim", config, [config.field]))
    store.write_report("projections.json", report)
    return f"Wrote {len(images)} projections to {config.output_dir}\n"


def _potential_from_report(path: str) -> MaxwellPotential:
    try:
        report = FitReport.model_validate_json(Path(path).read_text())
        basis = report.diagnostics["basis"]
        values = [c.value for c in report.coefficients]
        return MaxwellPotential.from_coefficients(
            values, basis["half_size_m"], basis["z_order"], basis["plane_terms"]
        )
    except FileNotFoundError:
        raise DataError(f"Coefficient report not found: {path}", path=path)
    except (KeyError, ValueError) as e:
        raise DataError(f"{path} is not a cube-fit report: {e}", path=path)


@with_error_context("link-check")
def run_link_check_command(config, store: IArtifactStore) -> str:
    m = config.elastic_model()
    if config.coefficients:
        potential = _potential_from_report(config.coefficients)
    else:
        potential = random_potential(config.half_size_mm * MM, config.z_order, config.plane_terms,
                                     config.stress_scale_mpa * MPA, config.seed)
    result = run_link_check(potential, m, config.resolutions, config.contamination, config.n_rays, config.seed)

    columns = ["cells", "reconstruction_error", "contamination_change", "lrt_null_residual"]
    rows = [{c: getattr(row, c) for c in columns} for row in result.rows]
    store.write_text("link_check.csv", csv_io.table_csv(rows, columns))
    warnings = [] if result.error_decreasing else ["Reconstruction error does not decrease under refinement"]
    report = RunReport(
        kind="link-check",
        status=status_for(warnings),
        results={"rows": rows, "error_decreasing": result.error_decreasing},
        artifacts=store.manifest(),
        warnings=warnings,
        provenance=_provenance("link-check", config, [config.coefficients] if config.coefficients else []),
    )
    store.write_report("link_check.json", report)
    return csv_io.table_text(rows, columns)


PIPELINES: Dict[str, Callable[[RunConfig, IArtifactStore], str]] = {
    "axisym-forward": run_axisym_forward,
    "axisym-fit": run_axisym_fit,
    "axisym-fit-d0": run_axisym_fit_d0,
    "cube-fit": run_cube_fit,
    "decompose": run_decompose,
    "lrt-sim": run_lrt_sim,
    "link-check": run_link_check_command,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenstrain",
        description="Eigenstrain reconstruction of residual stress fields",
        epilog="Any configuration key can be overridden with --key=value.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--log-level", default=None)
    parser.add_argument("--json-logs", action="store_true")
    return parser


def parse_overrides(extra: Sequence[str]) -> Dict[str, Any]:
    """
    Decode ``--key=value`` arguments.

    Raises:
        ConfigurationError: On anything that is not of that form
    """
    overrides = {}
    for item in extra:
        if not item.startswith("--") or "=" not in item:
            raise ConfigurationError(f"Unrecognized argument '{item}'; overrides use --key=value")
        key, raw = item[2:].split("=", 1)
        if not key:
            raise ConfigurationError(f"Empty override key in '{item}'")
        overrides[key.replace("-", "_")] = parse_override(raw)
    return overrides


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        Process exit code: 0 success, 1 numerical failure, 2 usage error,
        3 I/O or parse error
    """
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exit_:
        return int(exit_.code) if exit_.code is not None else EXIT_USAGE

    log_level = (args.log_level or settings.LOG_LEVEL).upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        log_level = "INFO"
    setup_logging(log_level, settings.LOG_FILE, args.json_logs or settings.JSON_LOGS)
    reporter = ErrorReporter()
    try:
        overrides = parse_overrides(extra)
        config = load_run_config(args.subcommand, args.config, overrides)
        store = create_artifact_store("file", root=config.output_dir)
        with LogContext(subcommand=args.subcommand):
            with Timer("pipeline", subcommand=args.subcommand):
                summary = PIPELINES[args.subcommand](config, store)
        sys.stdout.write(summary)
        return EXIT_OK
    except Exception as e:
        payload = ErrorPayload(**reporter.report(e))
        logger.error(format_error_message(e, args.subcommand), category=payload.category)
        if payload.exit_code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        sys.stderr.write(json.dumps(payload.model_dump(mode="json"), sort_keys=True) + "\n")
        return payload.exit_code


__all__ = ["PIPELINES", "RUN_CONFIGS", "build_parser", "main", "parse_overrides"]
