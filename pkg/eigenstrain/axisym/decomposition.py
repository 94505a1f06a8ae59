"""Null-space and solenoidal parts of axisymmetric polynomial eigenstrains."""

from typing import Tuple

import numpy as np
import structlog
from numpy.polynomial import Polynomial

from eigenstrain.axisym.field import AxisymPolyField, descending_coefficients, descending_polynomial
from eigenstrain.axisym.forward import R_SHIFT, radial_driver, check_axis_regular, divide_by_r, particular_solution

logger = structlog.get_logger()


def null_field(g, h_constant: float, radius: float) -> AxisymPolyField:
    """
    Eigenstrain that produces no stress.

    eps_tt is given by ``g``, eps_rr = d(r eps_tt)/dr, i.e. f_i = (l - i + 1) g_i,
    and eps_zz is the constant ``h_constant``.
    """
    g = np.asarray(g, dtype=float)
    order = g.size
    h = np.zeros(order)
    h[-1] = h_constant
    return AxisymPolyField(order, radius, (order - np.arange(order)) * g, g, h)


def null_residual(e: AxisymPolyField) -> float:
    """Largest violation of the null-space conditions, in normalized coefficients."""
    f_hat, g_hat, h_hat = e.normalized()
    l = e.order
    return float(max(np.max(np.abs(f_hat - (l - np.arange(l)) * g_hat)), np.max(np.abs(h_hat[:-1]), initial=0.0)))


def solenoidal_residual(e: AxisymPolyField) -> float:
    """
    Largest violation of the orthogonal-complement constraints, normalized.

    g_i = (l - i + 1) f_i, eps_rr(R) = 0 and the r-weighted integral of eps_zz vanishes.
    """
    f_hat, g_hat, h_hat = e.normalized()
    l = e.order
    ratio = np.max(np.abs(g_hat - (l - np.arange(l)) * f_hat))
    edge = abs(np.sum(f_hat))
    axial = abs(np.sum(2.0 * h_hat / (l - np.arange(l) + 1.0)))
    return float(max(ratio, edge, axial))


def inner_product_poly(a: AxisymPolyField, b: AxisymPolyField) -> float:
    """Integral over [0, R] of r (a_rr b_rr + a_tt b_tt + a_zz b_zz)."""
    total = Polynomial([0.0])
    for pa, pb in zip(a.polynomials(), b.polynomials()):
        total = total + pa * pb
    return float((total * R_SHIFT).integ()(a.radius))


def decompose_poly(e: AxisymPolyField) -> Tuple[AxisymPolyField, AxisymPolyField]:
    """
    Split an eigenstrain into its null-space and solenoidal parts.

    The null part (U', U/r, c) is the least-squares projection of e onto
    potential fields: U solves U'' + U'/r - U/r^2 = eps_rr' + (eps_rr - eps_tt)/r
    with U'(R) = eps_rr(R), and c is the r-weighted mean of eps_zz. Both parts
    keep the order of e and sum to e exactly.

    Raises:
        NonPolynomialRHSError: If f_l != g_l
    """
    check_axis_regular(e)
    l, R = e.order, e.radius
    err, _, ezz = e.polynomials()

    up = particular_solution(radial_driver(e, 0.0, 1.0), l)
    Up = descending_polynomial(up)
    alpha = err(R) - Up.deriv()(R)
    U = Up + Polynomial([0.0, alpha])

    c = 2.0 / R ** 2 * (ezz * R_SHIFT).integ()(R)
    h_null = np.zeros(l)
    h_null[-1] = c
    null = AxisymPolyField(
        l,
        R,
        descending_coefficients(U.deriv(), l),
        descending_coefficients(divide_by_r(U), l),
        h_null,
    )
    solenoidal = e - null

    logger.debug(
        "Decomposed axisymmetric eigenstrain",
        order=l,
        null_residual=null_residual(null),
        solenoidal_residual=solenoidal_residual(solenoidal),
    )
    return null, solenoidal
