"""Closed-form forward eigenstrain solution for long axisymmetric cylinders."""

from typing import Tuple

import numpy as np
import structlog
from numpy.polynomial import Polynomial

from eigenstrain.axisym.field import (
    AxisymPolyField,
    AxisymSolution,
    AxisymStressProfile,
    descending_coefficients,
    descending_polynomial,
)
from eigenstrain.constants import RHS_TOLERANCE
from eigenstrain.errors import ConfigurationError, DataError, NonPolynomialRHSError, SingularModelError
from eigenstrain.tensor_core import ElasticModel, apply_stiffness

logger = structlog.get_logger()

R_SHIFT = Polynomial([0.0, 1.0])


def divide_by_r(poly: Polynomial) -> Polynomial:
    """Drop the constant term and lower every power by one."""
    if poly.coef.size <= 1:
        return Polynomial([0.0])
    return Polynomial(poly.coef[1:])


def check_axis_regular(e: AxisymPolyField):
    """
    Reject fields whose (eps_rr - eps_tt) / r is singular on the axis.

    Raises:
        NonPolynomialRHSError: If f_l and g_l differ beyond roundoff
    """
    scale = max(abs(e.f[-1]), abs(e.g[-1]))
    if abs(e.axis_mismatch) > RHS_TOLERANCE * scale:
        raise NonPolynomialRHSError(
            "f_l and g_l differ, so (eps_rr - eps_tt)/r has a 1/r term",
            f_l=float(e.f[-1]),
            g_l=float(e.g[-1]),
        )


def radial_driver(e: AxisymPolyField, coupling: float, mismatch_weight: float) -> np.ndarray:
    err, ett, ezz = e.polynomials()
    poly = err.deriv() + coupling * (ett.deriv() + ezz.deriv()) + mismatch_weight * divide_by_r(err - ett)
    return descending_coefficients(poly, e.order - 1)


def build_rhs(e: AxisymPolyField, m: ElasticModel) -> np.ndarray:
    """
    Right-hand side of the radial displacement equation.

    ``b = eps_rr' + nu/(1-nu) (eps_tt' + eps_zz') + (1-2nu)/(1-nu) (eps_rr - eps_tt)/r``
    assembled exactly from the coefficients.

    Returns:
        b of length l - 1, ``b[i-1]`` multiplying r^(l - 1 - i)

    Raises:
        NonPolynomialRHSError: If f_l != g_l
    """
    check_axis_regular(e)
    nu = m.poisson_ratio
    return radial_driver(e, nu / (1.0 - nu), (1.0 - 2.0 * nu) / (1.0 - nu))


def particular_solution(b: np.ndarray, order: int) -> np.ndarray:
    """
    Polynomial particular solution of U'' + U'/r - U/r^2 = sum b_i r^(l-1-i).

    Substituting r^k gives (k^2 - 1) r^(k-2), so the coefficient of
    r^(l+1-i) is b_i / ((l+1-i)^2 - 1); the last two coefficients are zero.

    Args:
        b: Right-hand side coefficients, length l - 1
        order: l, at least 1

    Returns:
        Coefficients of length l + 1, the i-th multiplying r^(l + 1 - i)
    """
    if order < 1:
        raise ConfigurationError(f"Particular solution needs order >= 1, got {order}")
    b = np.asarray(b, dtype=float)
    if b.size != order - 1:
        raise ConfigurationError(f"Expected {order - 1} right-hand side coefficients, got {b.size}")
    powers = order + 1 - np.arange(1, order, dtype=float)
    up = np.zeros(order + 1)
    up[: order - 1] = b / (powers ** 2 - 1.0)
    return up


def solve_constants(e: AxisymPolyField, up: np.ndarray, m: ElasticModel) -> Tuple[float, float]:
    """
    Homogeneous coefficient alpha and axial strain from the end conditions.

    Solves the pair ``alpha + nu eps_zz_bar = t`` (no radial traction at R) and
    ``2 alpha + (1-nu)/nu eps_zz_bar = a`` (zero net axial force), with the
    axial integral evaluated exactly.

    Raises:
        SingularModelError: If nu = 0, where the axial equation degenerates
    """
    nu = m.poisson_ratio
    if nu == 0.0:
        raise SingularModelError("Axial balance is singular for a zero Poisson's ratio", poisson_ratio=nu)
    R = e.radius
    err, ett, ezz = e.polynomials()
    total = err + ett + ezz
    Up = descending_polynomial(up)
    dUp = Up.deriv()

    traction = -nu * (dUp(R) + Up(R) / R - total(R)) - (1.0 - 2.0 * nu) * (dUp(R) - err(R))
    weighted = (total + (1.0 - 2.0 * nu) / nu * ezz) * R_SHIFT
    axial = -2.0 * Up(R) / R + 2.0 / R ** 2 * weighted.integ()(R)

    system = np.array([[1.0, nu], [2.0, (1.0 - nu) / nu]])
    alpha, eps_zz_bar = np.linalg.solve(system, np.array([traction, axial]))
    return float(alpha), float(eps_zz_bar)


def solve(e: AxisymPolyField, m: ElasticModel) -> AxisymSolution:
    """Displacement and axial strain generated by an eigenstrain."""
    up = particular_solution(build_rhs(e, m), e.order)
    alpha, eps_zz_bar = solve_constants(e, up, m)
    return AxisymSolution(up=up, alpha=alpha, eps_zz_bar=eps_zz_bar)


def elastic_strain_polynomials(e: AxisymPolyField, m: ElasticModel):
    """Elastic strain components (rr, tt, zz) as polynomials in r."""
    solution = solve(e, m)
    U = solution.displacement()
    err, ett, ezz = e.polynomials()
    return U.deriv() - err, divide_by_r(U) - ett, Polynomial([solution.eps_zz_bar]) - ezz


def stress_polynomials(e: AxisymPolyField, m: ElasticModel):
    """Stress components (rr, tt, zz) as polynomials in r."""
    e_rr, e_tt, e_zz = elastic_strain_polynomials(e, m)
    lam, mu = m.lame_lambda, m.shear_modulus
    trace = e_rr + e_tt + e_zz
    return lam * trace + 2.0 * mu * e_rr, lam * trace + 2.0 * mu * e_tt, lam * trace + 2.0 * mu * e_zz


def _check_radii(r: np.ndarray, radius: float):
    if np.any(r < 0.0) or np.any(r > radius * (1.0 + 1e-12)):
        raise DataError(
            "Radii must lie in [0, R]",
            radius=radius,
            min_r=float(np.min(r)),
            max_r=float(np.max(r)),
        )


def elastic_strain(e: AxisymPolyField, m: ElasticModel, r) -> np.ndarray:
    """Elastic strain at radii r as Voigt arrays of shape (n, 6)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    _check_radii(r, e.radius)
    strain = np.zeros((r.size, 6))
    for k, poly in enumerate(elastic_strain_polynomials(e, m)):
        strain[:, k] = poly(r)
    return strain


def forward_stress(e: AxisymPolyField, m: ElasticModel, r) -> AxisymStressProfile:
    """
    Residual stress of a long traction-free cylinder carrying eigenstrain e.

    The elastic strains are U' - eps_rr, U/r - eps_tt and eps_zz_bar - eps_zz,
    with U/r taken as the polynomial quotient so r = 0 is regular.

    Args:
        e: Eigenstrain field
        m: Elastic constants
        r: Radii in meters within [0, R]

    Returns:
        Stress profile at r
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    stress = apply_stiffness(elastic_strain(e, m, r), m)
    return AxisymStressProfile.from_array(r, stress[:, :3])


def equilibrium_residual(e: AxisymPolyField, m: ElasticModel, r) -> np.ndarray:
    """Radial equilibrium residual d(sigma_rr)/dr + (sigma_rr - sigma_tt)/r at r > 0."""
    s_rr, s_tt, _ = stress_polynomials(e, m)
    r = np.asarray(r, dtype=float)
    return s_rr.deriv()(r) + (s_rr(r) - s_tt(r)) / r


def axial_force(e: AxisymPolyField, m: ElasticModel) -> float:
    """Integral of r sigma_zz over [0, R]."""
    _, _, s_zz = stress_polynomials(e, m)
    return float((s_zz * R_SHIFT).integ()(e.radius))
