"""Least-squares fits of Maxwell potentials to pointwise stress samples."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.spatial import Delaunay

from eigenstrain.config import settings
from eigenstrain.constants import N_VOIGT, VOIGT_LABELS
from eigenstrain.errors import ConfigurationError, DataError
from eigenstrain.linalg import svd_solve
from eigenstrain.maxwell.potential import MaxwellPotential

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class StressSampleSet:
    """
    Stress measured at scattered points of the cube.

    Attributes:
        points: Coordinates in meters, shape (n, 3)
        sigma: Voigt stress in Pa, shape (n, 6)
        uncertainty: Optional standard deviations in Pa, shape (n, 6)
    """

    points: np.ndarray
    sigma: np.ndarray
    uncertainty: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.array(self.points, dtype=float).reshape(-1, 3)
        sigma = np.array(self.sigma, dtype=float).reshape(-1, N_VOIGT)
        if len(points) != len(sigma):
            raise DataError(f"{len(points)} points but {len(sigma)} stress rows")
        points.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "sigma", sigma)
        if self.uncertainty is not None:
            uncertainty = np.array(self.uncertainty, dtype=float).reshape(-1, N_VOIGT)
            if uncertainty.shape != sigma.shape:
                raise DataError("Uncertainty rows do not match stress rows")
            if np.any(uncertainty <= 0.0):
                raise DataError("Uncertainties must be positive")
            uncertainty.setflags(write=False)
            object.__setattr__(self, "uncertainty", uncertainty)

    @property
    def n_points(self) -> int:
        return len(self.points)

    def outside(self, half_size: float, tol: float = 1e-12) -> np.ndarray:
        """Row indices of points outside [-L, L]^3."""
        bound = half_size * (1.0 + tol)
        return np.flatnonzero(np.any(np.abs(self.points) > bound, axis=1))

    def duplicate_groups(self) -> List[List[int]]:
        """Groups of row indices that share coordinates."""
        _, inverse, counts = np.unique(self.points, axis=0, return_inverse=True, return_counts=True)
        inverse = np.asarray(inverse).ravel()
        return [np.flatnonzero(inverse == g).tolist() for g in np.flatnonzero(counts > 1)]

    def scaled(self, factor: float) -> "StressSampleSet":
        uncertainty = None if self.uncertainty is None else abs(factor) * self.uncertainty
        return StressSampleSet(self.points, factor * self.sigma, uncertainty)


class ExtrapolationGuard:
    """
    Convex hull of sample points inside their affine span.

    Coplanar or collinear sample sets are handled by projecting onto the
    span first; a point off the span counts as outside.
    """

    def __init__(self, points: np.ndarray, tol: float = 1e-9):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        self.center = points.mean(axis=0)
        centered = points - self.center
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        self.scale = float(s[0]) if s.size and s[0] > 0.0 else 1.0
        self.tol = tol
        self.dimension = int(np.sum(s > tol * self.scale)) if s.size else 0
        self.basis = vt[: self.dimension]
        local = centered @ self.basis.T
        self._hull = None
        self._bounds = None
        if self.dimension >= 2:
            self._hull = Delaunay(local)
        elif self.dimension == 1:
            self._bounds = (float(local.min()), float(local.max()))

    def outside(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points outside the hull."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        centered = points - self.center
        local = centered @ self.basis.T
        off_span = np.linalg.norm(centered - local @ self.basis, axis=1)
        tolerance = self.tol * max(self.scale, 1.0)
        mask = off_span > tolerance
        if self._hull is not None:
            mask |= self._hull.find_simplex(local, tol=self.tol) < 0
        elif self._bounds is not None:
            lower, upper = self._bounds
            mask |= (local[:, 0] < lower - tolerance) | (local[:, 0] > upper + tolerance)
        return mask


@dataclass
class MaxwellFitResult:
    """Fitted potential with residual statistics and warnings."""

    potential: MaxwellPotential
    coefficients: np.ndarray
    labels: List[str]
    standard_errors: np.ndarray
    fitted: np.ndarray
    residual: np.ndarray
    rank: int
    condition_number: float
    weighted: bool
    warnings: List[str] = field(default_factory=list)

    @property
    def rms_by_component(self) -> dict:
        values = np.sqrt(np.mean(self.residual ** 2, axis=0)) if self.residual.size else np.zeros(N_VOIGT)
        return dict(zip(VOIGT_LABELS, (float(v) for v in values)))

    @property
    def max_by_component(self) -> dict:
        values = np.max(np.abs(self.residual), axis=0) if self.residual.size else np.zeros(N_VOIGT)
        return dict(zip(VOIGT_LABELS, (float(v) for v in values)))

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0


def _check_basis(basis: Sequence[MaxwellPotential]) -> MaxwellPotential:
    if not basis:
        raise ConfigurationError("Maxwell basis is empty")
    first = basis[0]
    for p in basis[1:]:
        if (p.half_size, p.z_order, p.plane_terms) != (first.half_size, first.z_order, first.plane_terms):
            raise ConfigurationError("Maxwell basis elements use different truncations")
    return first


def _basis_labels(basis: Sequence[MaxwellPotential], stacked: np.ndarray) -> List[str]:
    """Coefficient labels for unit bases, positional names otherwise."""
    if stacked.shape[0] == stacked.shape[1] and np.array_equal(stacked, np.eye(stacked.shape[0])):
        return list(basis[0].labels)
    return [f"basis[{k}]" for k in range(len(basis))]


def design_matrix(points: np.ndarray, basis: Sequence[MaxwellPotential]) -> np.ndarray:
    """Basis stresses at the sample points, rows sample-major, shape (6 n, n_basis)."""
    return np.column_stack([p.stress(points).ravel() for p in basis])


def fit_stress_field(
    samples: StressSampleSet,
    basis: Sequence[MaxwellPotential],
    weighted: bool = True,
) -> MaxwellFitResult:
    """
    Fit a linear combination of basis potentials to stress samples.

    The minimum-norm least-squares solution is found by SVD with singular
    values below the configured relative cutoff dropped.

    Args:
        samples: Measured stresses
        basis: Potentials sharing one truncation, e.g. from ``build_symmetric_basis``
        weighted: Weight rows by 1/uncertainty when the samples carry uncertainties

    Returns:
        MaxwellFitResult

    Raises:
        DataError: If there are no samples
        ConfigurationError: If the basis is empty or mixed
        DegenerateDesignError: If every basis stress vanishes at the samples
    """
    first = _check_basis(basis)
    if samples.n_points == 0:
        raise DataError("Stress sample set is empty")

    design = design_matrix(samples.points, basis)
    target = samples.sigma.ravel()
    use_weights = weighted and samples.uncertainty is not None
    weights = 1.0 / samples.uncertainty.ravel() if use_weights else np.ones(target.size)
    result = svd_solve(design * weights[:, None], target * weights, rcond=settings.SVD_RCOND)

    stacked = np.vstack([p.coefficients for p in basis])
    potential = MaxwellPotential.from_coefficients(
        result.solution @ stacked, first.half_size, first.z_order, first.plane_terms
    )
    fitted = (design @ result.solution).reshape(-1, N_VOIGT)
    residual = fitted - samples.sigma

    warnings = []
    if result.rank_deficient:
        warnings.append(
            f"Design matrix is rank deficient (rank {result.rank} of {result.n_parameters}); "
            "returning the minimum-norm solution"
        )
    for group in samples.duplicate_groups():
        warnings.append(f"Duplicate sample point at rows {group}; all rows retained")
    for message in warnings:
        logger.warning("Maxwell fit warning", detail=message)

    logger.info(
        "Maxwell fit finished",
        samples=samples.n_points,
        basis=len(basis),
        rank=result.rank,
        condition_number=result.condition_number,
        max_residual=float(np.max(np.abs(residual))),
    )
    return MaxwellFitResult(
        potential=potential,
        coefficients=result.solution,
        labels=_basis_labels(basis, stacked),
        standard_errors=result.standard_errors(scale_by_residual=not use_weights),
        fitted=fitted,
        residual=residual,
        rank=result.rank,
        condition_number=result.condition_number,
        weighted=use_weights,
        warnings=warnings,
    )


def sample_field(
    potential: MaxwellPotential,
    points: np.ndarray,
    guard: Optional[ExtrapolationGuard] = None,
) -> Tuple[np.ndarray, List[str]]:
    """
    Stress of a fitted potential at points, warning about extrapolation.

    Returns:
        Tuple of (stress of shape (n, 6), warnings)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    warnings = []
    if guard is not None:
        outside = int(np.count_nonzero(guard.outside(points)))
        if outside:
            warnings.append(
                f"{outside} of {len(points)} evaluation points lie outside the convex hull of the samples"
            )
            logger.warning("Evaluating fitted field outside the samples", points=outside, total=len(points))
    return potential.stress(points), warnings
