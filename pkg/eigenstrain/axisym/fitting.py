"""Least-squares eigenstrain fits to measured cylinder stress profiles."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import structlog

from eigenstrain.axisym.field import AxisymPolyField, AxisymStressProfile
from eigenstrain.axisym.forward import forward_stress
from eigenstrain.errors import DataError
from eigenstrain.linalg import LeastSquaresResult, svd_solve
from eigenstrain.tensor_core import ElasticModel

logger = structlog.get_logger()


@dataclass(frozen=True)
class FitOptions:
    """
    Switches for the axisymmetric fit.

    Attributes:
        exclude_null: Restrict the search to the orthogonal complement of the null space
        zero_linear: Force the coefficients of r^1 to zero
        weighted: Weight rows by 1/uncertainty when the profile carries uncertainties
    """

    exclude_null: bool = True
    zero_linear: bool = False
    weighted: bool = True


@dataclass(frozen=True)
class ParameterMap:
    """
    Linear map from free parameters to normalized coefficients [f_hat; g_hat; h_hat].

    Normalized coefficients multiply (r/R)^(l - i) and are dimensionless strains.
    """

    order: int
    matrix: np.ndarray
    labels: List[str]

    @property
    def n_parameters(self) -> int:
        return len(self.labels)

    def field(self, parameters: np.ndarray, radius: float) -> AxisymPolyField:
        coefficients = self.matrix @ np.asarray(parameters, dtype=float)
        l = self.order
        return AxisymPolyField.from_normalized(coefficients[:l], coefficients[l:2 * l], coefficients[2 * l:], radius)


def build_parameter_map(order: int, options: FitOptions) -> ParameterMap:
    """
    Free parameters of the fit and their coefficient map.

    With ``exclude_null`` the free parameters are f_i and h_i for i < l; the
    remaining coefficients follow from g_i = (l - i + 1) f_i, eps_rr(R) = 0,
    g_l = f_l and a vanishing r-weighted integral of eps_zz. Without it
    f_i, g_i and h_i are free, except that f_l and g_l share one parameter.
    """
    l = order
    linear = l - 2
    free = [j for j in range(l - 1) if not (options.zero_linear and j == linear)]
    columns, labels = [], []

    def column():
        return np.zeros(3 * l)

    if options.exclude_null:
        for j in free:
            col = column()
            col[j] = 1.0
            col[l + j] = float(l - j)
            col[l - 1] -= 1.0
            col[2 * l - 1] -= 1.0
            columns.append(col)
            labels.append(f"f[{j + 1}]")
        for j in free:
            col = column()
            col[2 * l + j] = 1.0
            col[3 * l - 1] -= 2.0 / (l - j + 1.0)
            columns.append(col)
            labels.append(f"h[{j + 1}]")
    else:
        for offset, name in ((0, "f"), (l, "g")):
            for j in free:
                col = column()
                col[offset + j] = 1.0
                columns.append(col)
                labels.append(f"{name}[{j + 1}]")
        col = column()
        col[l - 1] = 1.0
        col[2 * l - 1] = 1.0
        columns.append(col)
        labels.append(f"fg[{l}]")
        for j in free + [l - 1]:
            col = column()
            col[2 * l + j] = 1.0
            columns.append(col)
            labels.append(f"h[{j + 1}]")

    return ParameterMap(order=l, matrix=np.column_stack(columns), labels=labels)


def design_matrix(parameter_map: ParameterMap, r: np.ndarray, radius: float, m: ElasticModel) -> np.ndarray:
    """Forward stresses of every parameter, rows sample-major (rr, tt, zz)."""
    columns = []
    for k in range(parameter_map.n_parameters):
        unit = np.zeros(parameter_map.n_parameters)
        unit[k] = 1.0
        profile = forward_stress(parameter_map.field(unit, radius), m, r)
        columns.append(profile.stress.ravel())
    return np.column_stack(columns)


@dataclass
class AxisymFitResult:
    """Fitted eigenstrain with residuals and parameter statistics."""

    field: AxisymPolyField
    parameters: np.ndarray
    labels: List[str]
    standard_errors: np.ndarray
    fitted: AxisymStressProfile
    residual: np.ndarray
    rank: int
    condition_number: float
    weighted: bool
    warnings: List[str] = field(default_factory=list)

    @property
    def rms_residual(self) -> float:
        return float(np.sqrt(np.mean(self.residual ** 2))) if self.residual.size else 0.0

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0


def row_weights(uncertainty: Optional[np.ndarray], weighted: bool, n_rows: int) -> np.ndarray:
    if weighted and uncertainty is not None:
        return 1.0 / np.asarray(uncertainty, dtype=float).ravel()
    return np.ones(n_rows)


def solve_weighted(design: np.ndarray, target: np.ndarray, weights: np.ndarray) -> LeastSquaresResult:
    return svd_solve(design * weights[:, None], target * weights, scale_columns=True)


def fit_stress(
    profile: AxisymStressProfile,
    order: int,
    m: ElasticModel,
    options: Optional[FitOptions] = None,
    radius: Optional[float] = None,
) -> AxisymFitResult:
    """
    Fit a polynomial eigenstrain to a measured stress profile.

    Stress is linear in the eigenstrain coefficients, so the fit is a linear
    least-squares problem solved by truncated SVD. Rank deficiency, which is
    expected when null-space components are left in the search, yields the
    minimum-norm solution and a warning.

    Args:
        profile: Measured stresses
        order: Coefficients per component
        m: Elastic constants
        options: Fit switches
        radius: Cylinder radius in meters, defaults to the largest sample radius

    Returns:
        AxisymFitResult

    Raises:
        DataError: If the profile is empty
    """
    options = options or FitOptions()
    if profile.n_points == 0:
        raise DataError("Stress profile is empty")
    radius = float(radius if radius is not None else np.max(profile.r))

    parameter_map = build_parameter_map(order, options)
    design = design_matrix(parameter_map, profile.r, radius, m)
    weighted = options.weighted and profile.uncertainty is not None
    weights = row_weights(profile.uncertainty, options.weighted, design.shape[0])
    result = solve_weighted(design, profile.stress.ravel(), weights)

    return summarize_fit(parameter_map, result, design, profile, radius, m, weighted)


def summarize_fit(parameter_map, result, design, profile, radius, m, weighted) -> AxisymFitResult:
    warnings = []
    if design.shape[0] < parameter_map.n_parameters:
        warnings.append(
            f"{design.shape[0]} stress values for {parameter_map.n_parameters} free parameters"
        )
    if result.rank_deficient:
        warnings.append(
            f"Design matrix is rank deficient (rank {result.rank} of {result.n_parameters}); "
            "returning the minimum-norm solution"
        )

    fitted_field = parameter_map.field(result.solution, radius)
    fitted = forward_stress(fitted_field, m, profile.r)
    residual = fitted.stress - profile.stress

    for message in warnings:
        logger.warning("Axisymmetric fit warning", detail=message)
    logger.info(
        "Axisymmetric fit finished",
        parameters=parameter_map.n_parameters,
        rank=result.rank,
        condition_number=result.condition_number,
        max_residual=float(np.max(np.abs(residual))),
    )
    return AxisymFitResult(
        field=fitted_field,
        parameters=result.solution,
        labels=list(parameter_map.labels),
        standard_errors=result.standard_errors(scale_by_residual=not weighted),
        fitted=fitted,
        residual=residual,
        rank=result.rank,
        condition_number=result.condition_number,
        weighted=weighted,
        warnings=warnings,
    )
