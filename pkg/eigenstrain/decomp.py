"""Trivial, potential and solenoidal inverse eigenstrains of a residual stress field."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import structlog

from eigenstrain.constants import EQUILIBRIUM_WARNING_TOLERANCE, N_VOIGT
from eigenstrain.errors import ConfigurationError, DataError, MeshError
from eigenstrain.fem.fields import Convention, GridTensorField
from eigenstrain.fem.mesh import BoxMesh
from eigenstrain.fem.solver import (
    DecompositionMode,
    forward_solve,
    helmholtz_decompose,
    weak_flux_residual,
)
from eigenstrain.linalg import svd_solve
from eigenstrain.maxwell.fitting import StressSampleSet
from eigenstrain.maxwell.potential import MaxwellPotential
from eigenstrain.tensor_core import (
    ElasticModel,
    apply_compliance,
    apply_stiffness,
    field_norm,
    inner_product,
    mean_stress,
)

logger = structlog.get_logger()

WEIGHTS = ("identity", "stiffness")


def _flux_scale(sigma: GridTensorField) -> float:
    """Size of a nodal load produced by a unit-magnitude stress on one cell."""
    h = sigma.mesh.spacing
    return sigma.max_abs() * sigma.mesh.cell_volume / float(np.min(h))


def _flux_split(sigma: GridTensorField):
    """Largest weak-divergence residual at interior and at boundary nodes."""
    residual = np.abs(weak_flux_residual(sigma)).reshape(-1, 3).max(axis=1)
    boundary = sigma.mesh.boundary_nodes
    interior = float(residual[~boundary].max()) if np.any(~boundary) else 0.0
    return interior, float(residual[boundary].max())


def equilibrium_warnings(sigma: GridTensorField, tolerance: float = EQUILIBRIUM_WARNING_TOLERANCE) -> List[str]:
    """
    Check that a stress field is equilibrated with traction-free faces.

    The mean stress and the weak flux residual are compared with
    ``tolerance`` times the peak stress; problems are logged and returned.
    """
    peak = sigma.max_abs()
    if peak == 0.0:
        return []
    warnings = []
    mean = float(np.max(np.abs(mean_stress(sigma).to_array())))
    if mean > tolerance * peak:
        warnings.append(f"Mean stress is {mean / peak:.3g} of the peak stress")
    flux = max(_flux_split(sigma)) / _flux_scale(sigma)
    if flux > tolerance:
        warnings.append(f"Weak equilibrium residual is {flux:.3g} of the peak stress")
    for message in warnings:
        logger.warning("Stress field is not equilibrated", detail=message)
    return warnings


def trivial_solution(sigma: GridTensorField, m: ElasticModel, check: bool = True) -> GridTensorField:
    """
    Inverse eigenstrain -S:sigma, pointwise.

    Any equilibrated, traction-free stress is generated by this eigenstrain.
    With ``check`` the equilibrium of the input is verified and problems are
    logged as warnings.
    """
    if check:
        equilibrium_warnings(sigma)
    return sigma.map_values(lambda values: -apply_compliance(values, m))


@dataclass
class DecompositionReport:
    """Orthogonality and membership diagnostics of a potential/solenoidal pair."""

    orthogonality_residual: float
    l2_orthogonality_residual: float
    recomposition_error: Optional[float]
    potential_norm: float
    solenoidal_norm: float
    solenoidal_divergence: float
    solenoidal_boundary_flux: float
    warnings: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict[str, object]:
        return {
            "orthogonality_residual": self.orthogonality_residual,
            "l2_orthogonality_residual": self.l2_orthogonality_residual,
            "recomposition_error": self.recomposition_error,
            "potential_norm": self.potential_norm,
            "solenoidal_norm": self.solenoidal_norm,
            "solenoidal_divergence": self.solenoidal_divergence,
            "solenoidal_boundary_flux": self.solenoidal_boundary_flux,
            "warnings": list(self.warnings),
        }


def _normalized_product(a: GridTensorField, b: GridTensorField, weight: Optional[ElasticModel]) -> float:
    na, nb = field_norm(a, weight), field_norm(b, weight)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return abs(inner_product(a, b, weight)) / (na * nb)


def verify_energy_orthogonality(
    pot: GridTensorField,
    sol: GridTensorField,
    m: ElasticModel,
    mesh: BoxMesh,
    total: Optional[GridTensorField] = None,
) -> DecompositionReport:
    """
    Check that a potential part and a solenoidal part are energy-orthogonal.

    Args:
        pot: Symmetric-gradient part
        sol: Remainder
        m: Elastic constants defining the energy product
        mesh: Mesh both fields live on
        total: Field the parts were split from, for the recomposition error

    Returns:
        DecompositionReport with normalized products |<pot, sol>| / (|pot| |sol|)
        in the energy and plain metrics, plus the weak divergence and boundary
        flux of C:sol relative to its peak

    Raises:
        MeshError: If a field lives on another mesh
    """
    for name, item in (("pot", pot), ("sol", sol), ("total", total)):
        if item is not None and item.mesh != mesh:
            raise MeshError(f"Field '{name}' does not live on the given mesh", cells=item.mesh.cells)

    recomposition = None
    if total is not None:
        scale = max(total.max_abs(), np.finfo(float).tiny)
        recomposition = float(np.max(np.abs((pot + sol - total).values))) / scale

    stress = sol.map_values(lambda values: apply_stiffness(values, m))
    divergence, flux = 0.0, 0.0
    if stress.max_abs() > 0.0:
        interior, boundary = _flux_split(stress)
        divergence = interior / _flux_scale(stress)
        flux = boundary / _flux_scale(stress)

    report = DecompositionReport(
        orthogonality_residual=_normalized_product(pot, sol, m),
        l2_orthogonality_residual=_normalized_product(pot, sol, None),
        recomposition_error=recomposition,
        potential_norm=field_norm(pot, m),
        solenoidal_norm=field_norm(sol, m),
        solenoidal_divergence=divergence,
        solenoidal_boundary_flux=flux,
    )
    logger.info(
        "Energy orthogonality checked",
        orthogonality=report.orthogonality_residual,
        l2_orthogonality=report.l2_orthogonality_residual,
        recomposition_error=recomposition,
    )
    return report


def relative_error(estimate: GridTensorField, reference: GridTensorField) -> float:
    """L2 norm of the difference relative to the reference; absolute when the reference vanishes."""
    reference_norm = field_norm(reference)
    difference = field_norm(estimate - reference)
    if reference_norm == 0.0:
        return difference
    return difference / reference_norm


@dataclass
class DecompositionResult:
    """Fields of the stress decomposition pipeline, all at Gauss points."""

    trivial: GridTensorField
    potential: GridTensorField
    solenoidal: GridTensorField
    reconstructed_stress: GridTensorField
    reconstruction_error: float
    report: DecompositionReport
    weight: str
    warnings: List[str] = field(default_factory=list)


def decompose_stress(
    sigma: GridTensorField,
    m: ElasticModel,
    mesh: BoxMesh,
    weight: str = "stiffness",
) -> DecompositionResult:
    """
    Split the trivial inverse eigenstrain of a stress field.

    sigma -> eps* = -S:sigma -> zero-flux split into a symmetric gradient and
    a solenoidal part -> forward solve of the solenoidal part, which should
    reproduce sigma because potential eigenstrains are stress-free.

    Args:
        sigma: Residual stress field on ``mesh``
        m: Elastic constants
        mesh: Box mesh
        weight: ``stiffness`` for the energy-weighted split, ``identity`` for L2

    Returns:
        DecompositionResult
    """
    if weight not in WEIGHTS:
        raise ConfigurationError(f"Unknown decomposition weight '{weight}'", allowed=list(WEIGHTS))
    warnings = equilibrium_warnings(sigma)
    trivial = trivial_solution(sigma, m, check=False).to_gauss()
    split = helmholtz_decompose(
        trivial, mesh, DecompositionMode.ZERO_FLUX, weight=m if weight == "stiffness" else None
    )
    forward = forward_solve(split.solenoidal, m, mesh)
    error = relative_error(forward.stress, sigma)

    report = verify_energy_orthogonality(split.potential, split.solenoidal, m, mesh, total=trivial)
    report.warnings.extend(warnings)
    logger.info("Stress decomposition finished", weight=weight, reconstruction_error=error)
    return DecompositionResult(
        trivial=trivial,
        potential=split.potential,
        solenoidal=split.solenoidal,
        reconstructed_stress=forward.stress,
        reconstruction_error=error,
        report=report,
        weight=weight,
        warnings=warnings,
    )


@dataclass
class MaxwellInverseResult:
    """Solenoidal eigenstrain spanned by Maxwell basis fields, fitted through forward solves."""

    coefficients: np.ndarray
    potential: MaxwellPotential
    eigenstrain: GridTensorField
    stress: GridTensorField
    fitted: np.ndarray
    residual: np.ndarray
    rank: int
    condition_number: float
    warnings: List[str] = field(default_factory=list)


def maxwell_inverse_eigenstrain(
    samples: StressSampleSet,
    basis: Sequence[MaxwellPotential],
    m: ElasticModel,
    mesh: BoxMesh,
    weighted: bool = True,
) -> MaxwellInverseResult:
    """
    Fit an eigenstrain of the form sum_k c_k R(Lambda_k) to stress samples.

    Each basis stress field, read as an eigenstrain, is pushed through the
    forward solver; the resulting stresses at the sample points form the
    design matrix of a column-scaled truncated-SVD fit.

    Raises:
        DataError: If there are no samples or a sample lies outside the mesh
    """
    if not basis:
        raise ConfigurationError("Maxwell basis is empty")
    if samples.n_points == 0:
        raise DataError("Stress sample set is empty")
    if not np.all(mesh.contains(samples.points)):
        raise DataError("Stress samples extend beyond the mesh")
    first = basis[0]

    eigenstrains, stresses, columns = [], [], []
    for element in basis:
        eps = GridTensorField.from_function(mesh, element.stress, Convention.GAUSS)
        solution = forward_solve(eps, m, mesh)
        eigenstrains.append(eps.values)
        stresses.append(solution.stress.values)
        columns.append(solution.stress.evaluate(samples.points).ravel())
    design = np.column_stack(columns)

    target = samples.sigma.ravel()
    use_weights = weighted and samples.uncertainty is not None
    weights = 1.0 / samples.uncertainty.ravel() if use_weights else np.ones(target.size)
    result = svd_solve(design * weights[:, None], target * weights, scale_columns=True)
    c = result.solution

    warnings = []
    if result.rank_deficient:
        warnings.append(f"Design matrix is rank deficient (rank {result.rank} of {result.n_parameters})")
        logger.warning("Maxwell inverse eigenstrain warning", detail=warnings[-1])

    stacked = np.vstack([p.coefficients for p in basis])
    eigenstrain = np.tensordot(c, np.asarray(eigenstrains), axes=(0, 0))
    stress = np.tensordot(c, np.asarray(stresses), axes=(0, 0))
    fitted = (design @ c).reshape(-1, N_VOIGT)

    logger.info(
        "Maxwell inverse eigenstrain fitted",
        basis=len(basis),
        rank=result.rank,
        condition_number=result.condition_number,
    )
    return MaxwellInverseResult(
        coefficients=c,
        potential=MaxwellPotential.from_coefficients(c @ stacked, first.half_size, first.z_order, first.plane_terms),
        eigenstrain=GridTensorField(mesh, eigenstrain, Convention.GAUSS),
        stress=GridTensorField(mesh, stress, Convention.GAUSS),
        fitted=fitted,
        residual=fitted - samples.sigma,
        rank=result.rank,
        condition_number=result.condition_number,
        warnings=warnings,
    )
