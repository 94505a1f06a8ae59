"""Joint fit of eigenstrain and a radially varying unstressed lattice spacing."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import structlog

from eigenstrain.axisym.field import AxisymStressProfile, D0Poly, LatticeProfile
from eigenstrain.axisym.fitting import (
    AxisymFitResult,
    FitOptions,
    summarize_fit,
    build_parameter_map,
    design_matrix,
    row_weights,
    solve_weighted,
)
from eigenstrain.config import settings
from eigenstrain.constants import (
    D0_CHECK_POINTS,
    LM_COST_TOLERANCE,
    LM_DAMPING_DECREASE,
    LM_DAMPING_INCREASE,
    LM_INITIAL_DAMPING,
    LM_MAX_DAMPING,
    LM_STEP_TOLERANCE,
)
from eigenstrain.errors import ConfigurationError, DataError
from eigenstrain.linalg import DecomposedMatrix, column_scale
from eigenstrain.tensor_core import ElasticModel, apply_stiffness

logger = structlog.get_logger()


@dataclass
class D0FitResult:
    """Outcome of the joint eigenstrain and d0 fit."""

    fit: AxisymFitResult
    d0: D0Poly
    iterations: int
    converged: bool
    cost_history: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def final_cost(self) -> float:
        return self.cost_history[-1] if self.cost_history else 0.0


def lattice_stress(lattice: LatticeProfile, d0: D0Poly, m: ElasticModel) -> np.ndarray:
    """Stress implied by spacings through eps = (d - d0)/d0, shape (n, 3)."""
    d0_values = d0.evaluate(lattice.r)[:, None]
    strain = np.zeros((lattice.n_points, 6))
    strain[:, :3] = (lattice.spacing - d0_values) / d0_values
    return apply_stiffness(strain, m)[:, :3]


def lattice_stress_jacobian(lattice: LatticeProfile, d0: D0Poly, m: ElasticModel) -> np.ndarray:
    """Derivative of :func:`lattice_stress` with respect to the d0 coefficients, shape (3n, n_c)."""
    rho = lattice.r / d0.radius
    d0_values = d0.evaluate(lattice.r)[:, None]
    columns = []
    for j in range(d0.order + 1):
        strain = np.zeros((lattice.n_points, 6))
        strain[:, :3] = -lattice.spacing / d0_values ** 2 * (rho ** j)[:, None]
        columns.append(apply_stiffness(strain, m)[:, :3].ravel())
    return np.column_stack(columns)


def stress_uncertainty(lattice: LatticeProfile, d0_ref: float, m: ElasticModel) -> Optional[np.ndarray]:
    """Stress-space uncertainties E u / d0_ref from spacing uncertainties."""
    if lattice.uncertainty is None:
        return None
    return m.youngs_modulus * lattice.uncertainty / d0_ref


def fit_with_d0(
    lattice: LatticeProfile,
    order: int,
    d0_order: int,
    m: ElasticModel,
    d0_ref: float,
    radius: float,
    options: Optional[FitOptions] = None,
) -> D0FitResult:
    """
    Fit eigenstrain coefficients and a polynomial d0(r) to lattice spacings.

    The eigenstrain coefficients enter linearly and are eliminated exactly at
    every iterate, leaving a small nonlinear problem in the d0 coefficients
    that is minimized by Levenberg-Marquardt with Marquardt scaling. Steps
    that make d0 non-positive anywhere on [0, R] are rejected.

    Args:
        lattice: Spacings per direction
        order: Eigenstrain coefficients per component
        d0_order: Polynomial order of d0
        m: Elastic constants
        d0_ref: Constant reference spacing, the starting point
        radius: Cylinder radius in meters
        options: Fit switches

    Returns:
        D0FitResult; non-convergence is flagged, not raised
    """
    options = options or FitOptions()
    if lattice.n_points == 0:
        raise DataError("Lattice profile is empty")
    if d0_order < 0:
        raise ConfigurationError(f"d0_order must be non-negative, got {d0_order}")

    parameter_map = build_parameter_map(order, options)
    design = design_matrix(parameter_map, lattice.r, radius, m)
    uncertainty = stress_uncertainty(lattice, d0_ref, m)
    weighted = options.weighted and uncertainty is not None
    weights = row_weights(uncertainty, options.weighted, design.shape[0])

    # column-scaled factorization of the weighted design, reused every iteration
    weighted_design = design * weights[:, None]
    basis = DecomposedMatrix.from_matrix(weighted_design / column_scale(weighted_design), settings.SVD_RCOND).u

    def project_out(v: np.ndarray) -> np.ndarray:
        return v - basis @ (basis.T @ v)

    def residual_at(c: np.ndarray) -> np.ndarray:
        d0 = D0Poly(c, radius, d0_ref)
        return -project_out(weights * lattice_stress(lattice, d0, m).ravel())

    c = np.zeros(d0_order + 1)
    c[0] = d0_ref
    residual = residual_at(c)
    cost = 0.5 * float(residual @ residual)
    cost_history = [cost]
    damping = LM_INITIAL_DAMPING
    converged = cost == 0.0
    warnings: List[str] = []
    iteration = 0

    while not converged and iteration < settings.LM_MAX_ITERATIONS:
        iteration += 1
        d0 = D0Poly(c, radius, d0_ref)
        jacobian = -project_out(weights[:, None] * lattice_stress_jacobian(lattice, d0, m))
        jtj_diag = np.sum(jacobian ** 2, axis=0)
        jtj_diag = np.where(jtj_diag > 0.0, jtj_diag, 1.0)

        accepted = False
        while damping <= LM_MAX_DAMPING:
            augmented = np.vstack([jacobian, np.diag(np.sqrt(damping * jtj_diag))])
            rhs = np.concatenate([-residual, np.zeros(c.size)])
            step = np.linalg.lstsq(augmented, rhs, rcond=None)[0]
            trial = c + step
            if not D0Poly(trial, radius, d0_ref).is_positive(D0_CHECK_POINTS):
                damping *= LM_DAMPING_INCREASE
                continue
            trial_residual = residual_at(trial)
            trial_cost = 0.5 * float(trial_residual @ trial_residual)
            if trial_cost <= cost:
                accepted = True
                break
            if abs(cost - trial_cost) <= LM_COST_TOLERANCE * cost:
                break
            damping *= LM_DAMPING_INCREASE

        if not accepted:
            # trial cost matched the current one to tolerance, or damping ran out
            converged = bool(damping <= LM_MAX_DAMPING)
            if not converged:
                warnings.append("Levenberg-Marquardt damping exceeded its limit")
            break

        relative_step = np.linalg.norm(step) / max(np.linalg.norm(c), np.finfo(float).tiny)
        relative_change = (cost - trial_cost) / cost if cost > 0.0 else 0.0
        c, residual, cost = trial, trial_residual, trial_cost
        cost_history.append(cost)
        damping = max(damping / LM_DAMPING_DECREASE, np.finfo(float).eps)
        converged = bool(relative_step < LM_STEP_TOLERANCE or relative_change < LM_COST_TOLERANCE or cost == 0.0)

    if not converged and not warnings:
        warnings.append(f"Levenberg-Marquardt stopped after {iteration} iterations without converging")

    d0 = D0Poly(c, radius, d0_ref)
    stress = lattice_stress(lattice, d0, m)
    profile = AxisymStressProfile.from_array(lattice.r, stress, uncertainty)
    result = solve_weighted(design, stress.ravel(), weights)
    fit = summarize_fit(parameter_map, result, design, profile, radius, m, weighted)
    fit.warnings.extend(warnings)

    for message in warnings:
        logger.warning("d0 fit warning", detail=message)
    logger.info(
        "d0 fit finished",
        iterations=iteration,
        converged=converged,
        cost=cost,
        d0_coefficients=c.tolist(),
    )
    return D0FitResult(
        fit=fit,
        d0=d0,
        iterations=iteration,
        converged=converged,
        cost_history=cost_history,
        warnings=warnings,
    )
