"""Tests for the closed-form cylinder solution and its null-space split."""

import numpy as np
import pytest
from scipy import sparse
from scipy.integrate import trapezoid
from scipy.sparse.linalg import spsolve

from eigenstrain.axisym import (
    AxisymPolyField,
    AxisymStressProfile,
    build_rhs,
    decompose_poly,
    elastic_strain,
    forward_stress,
    inner_product_poly,
    null_field,
    particular_solution,
    solve,
)
from eigenstrain.axisym.decomposition import null_residual, solenoidal_residual
from eigenstrain.axisym.forward import axial_force, equilibrium_residual
from eigenstrain.errors import ConfigurationError, DataError, NonPolynomialRHSError, SingularModelError
from eigenstrain.tensor_core import ElasticModel

RADIUS = 1.5e-3


def random_field(rng, order=6, radius=RADIUS, scale=1e-3):
    """Random axis-regular eigenstrain with strains of order ``scale``."""
    f_hat, g_hat, h_hat = rng.uniform(-scale, scale, (3, order))
    g_hat[-1] = f_hat[-1]
    return AxisymPolyField.from_normalized(f_hat, g_hat, h_hat, radius)


def finite_difference_cylinder(e, m, n=10001):
    """
    Stresses from a direct discretization of the displacement equation.

    Works in rho = r/R with u/R as unknown. Rows: u(0) = 0, central
    differences of u'' + u'/rho - u/rho^2 at interior nodes, sigma_rr(R) = 0
    with a one-sided derivative, and zero axial force, which integrates
    exactly to lambda u(R) R + (lambda + 2 mu) eps_zz R^2 / 2 on the left.
    """
    rho = np.linspace(0.0, 1.0, n)
    h = rho[1]
    lam, mu = m.lame_lambda, m.shear_modulus
    k = lam + 2.0 * mu
    eps = e.evaluate(rho * e.radius)
    q = k * eps[:, 0] + lam * (eps[:, 1] + eps[:, 2])

    i = np.arange(1, n - 1)
    ri = rho[i]
    rows = [0, *i, *i, *i, n - 1, n - 1, n - 1, n - 1, n, n]
    cols = [0, *(i - 1), *i, *(i + 1), n - 1, n - 2, n - 3, n, n - 1, n]
    vals = [
        1.0,
        *(1.0 / h ** 2 - 0.5 / (h * ri)),
        *(-2.0 / h ** 2 - 1.0 / ri ** 2),
        *(1.0 / h ** 2 + 0.5 / (h * ri)),
        1.5 / h + lam / k, -2.0 / h, 0.5 / h, lam / k,
        lam / k, 0.5,
    ]
    A = sparse.coo_matrix((vals, (rows, cols)), shape=(n + 1, n + 1)).tocsc()
    b = np.zeros(n + 1)
    b[i] = (np.gradient(q, rho, edge_order=2)[i] + 2.0 * mu * (eps[i, 0] - eps[i, 1]) / ri) / k
    b[n - 1] = q[-1] / k
    b[n] = trapezoid((lam * (eps[:, 0] + eps[:, 1]) + k * eps[:, 2]) * rho, rho) / k

    x = spsolve(A, b)
    u, eps_zz = x[:n], x[n]
    du = np.gradient(u, rho, edge_order=2)
    u_over_r = np.divide(u, rho, out=du.copy(), where=rho > 0.0)
    stress = np.column_stack([
        k * du + lam * u_over_r + lam * eps_zz - q,
        lam * du + k * u_over_r + lam * eps_zz - (lam * eps[:, 0] + k * eps[:, 1] + lam * eps[:, 2]),
        lam * (du + u_over_r) + k * eps_zz - (lam * (eps[:, 0] + eps[:, 1]) + k * eps[:, 2]),
    ])
    return rho * e.radius, stress


def test_rhs_and_particular_solution():
    """eps_rr = r^2 at nu = 0.3 drives b = (2 + 4/7) r."""
    m = ElasticModel(100e9, 0.3)
    e = AxisymPolyField(3, 1.0, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    b = build_rhs(e, m)
    np.testing.assert_allclose(b, [2.0 + 4.0 / 7.0, 0.0], rtol=1e-14)
    np.testing.assert_allclose(particular_solution(b, 3), [b[0] / 8.0, 0.0, 0.0, 0.0], rtol=1e-14)


def test_particular_solution_checks_length():
    """The right-hand side must have l - 1 coefficients."""
    with pytest.raises(ConfigurationError):
        particular_solution([1.0, 2.0, 3.0], 3)


def test_non_polynomial_rhs():
    """f_l != g_l leaves a 1/r term in the driver."""
    e = AxisymPolyField(2, 1.0, [0.0, 1e-3], [0.0, 2e-3], [0.0, 0.0])
    with pytest.raises(NonPolynomialRHSError):
        build_rhs(e, ElasticModel(100e9, 0.3))


def test_zero_poisson_ratio_is_singular():
    """The axial balance degenerates at nu = 0."""
    e = AxisymPolyField(3, 1.0, [1e-3, 0.0, 0.0], [1e-3, 0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(SingularModelError):
        solve(e, ElasticModel(100e9, 0.0))


def test_uniform_eigenstrain_is_stress_free(bronze):
    """A constant eigenstrain is taken up by uniform expansion."""
    e = AxisymPolyField(1, RADIUS, [1e-3], [1e-3], [-2e-3])
    r = np.linspace(0.0, RADIUS, 7)
    np.testing.assert_allclose(forward_stress(e, bronze, r).stress, 0.0, atol=1e-9 * 130e9 * 1e-3)
    assert solve(e, bronze).eps_zz_bar == pytest.approx(-2e-3)


def test_quadratic_thermal_profile(bronze):
    """An isotropic r^2 eigenstrain matches the free-ended thermal cylinder."""
    e = AxisymPolyField(3, 1.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    r = np.linspace(0.0, 1.0, 11)
    k = 130e9 / (1.0 - 0.34)
    expected = np.column_stack([k * (1.0 - r ** 2) / 4.0, k * (1.0 - 3.0 * r ** 2) / 4.0, k * (0.5 - r ** 2)])
    np.testing.assert_allclose(forward_stress(e, bronze, r).stress, expected, rtol=1e-10, atol=1e-6 * k)


def test_forward_stress_is_balanced(bronze, rng):
    """Radial equilibrium, a free surface and zero axial force hold for random fields."""
    e = random_field(rng)
    scale = 130e9 * 1e-3
    r = np.linspace(0.05, 1.0, 20) * RADIUS
    assert np.max(np.abs(equilibrium_residual(e, bronze, r))) < 1e-8 * scale / RADIUS
    sigma_rr_edge = forward_stress(e, bronze, [RADIUS]).sigma_rr[0]
    assert abs(sigma_rr_edge) < 1e-9 * scale
    assert abs(axial_force(e, bronze)) < 1e-9 * scale * RADIUS ** 2


def test_forward_solution_against_finite_differences(bronze, rng):
    """Sampled stresses satisfy equilibrium and strain compatibility under numerical differentiation."""
    e = random_field(rng, order=5)
    r = np.linspace(0.1, 1.0, 10001) * RADIUS
    profile = forward_stress(e, bronze, r)
    scale = np.max(np.abs(profile.stress))

    residual = np.gradient(profile.sigma_rr, r, edge_order=2) + (profile.sigma_rr - profile.sigma_tt) / r
    assert np.max(np.abs(residual)) < 1e-6 * scale / RADIUS

    total = elastic_strain(e, bronze, r)[:, :3] + e.evaluate(r)
    compatibility = total[:, 0] - np.gradient(r * total[:, 1], r, edge_order=2)
    assert np.max(np.abs(compatibility)) < 1e-6 * np.max(np.abs(total))
    # uniform axial strain
    assert np.ptp(total[:, 2]) < 1e-12 * np.max(np.abs(total))


def test_forward_solution_matches_direct_discretization(bronze, rng):
    """The closed form agrees with a 10^4-point finite-difference solve of the boundary value problem."""
    for _ in range(5):
        e = random_field(rng, order=5)
        r, expected = finite_difference_cylinder(e, bronze)
        scale = np.max(np.abs(expected))
        np.testing.assert_allclose(forward_stress(e, bronze, r).stress, expected, rtol=0.0, atol=1e-5 * scale)


def test_elastic_strain_shape(bronze, rng):
    """Elastic strains come back as Voigt rows with zero shear."""
    strain = elastic_strain(random_field(rng), bronze, np.linspace(0.0, RADIUS, 4))
    assert strain.shape == (4, 6)
    assert np.all(strain[:, 3:] == 0.0)


def test_radii_outside_cylinder(bronze, rng):
    """Radii beyond R or below zero are rejected."""
    e = random_field(rng)
    with pytest.raises(DataError):
        forward_stress(e, bronze, [0.5 * RADIUS, 1.1 * RADIUS])
    with pytest.raises(DataError):
        forward_stress(e, bronze, [-0.1 * RADIUS])


def test_null_field_is_stress_free(bronze):
    """eps_tt = r^3, eps_rr = 4 r^3 and constant eps_zz leave no stress."""
    e = null_field([1.0, 0.0, 0.0, 0.0], 2e-3, 1.0)
    np.testing.assert_array_equal(e.f, [4.0, 0.0, 0.0, 0.0])
    r = np.linspace(0.0, 1.0, 9)
    np.testing.assert_allclose(forward_stress(e, bronze, r).stress, 0.0, atol=1e-10 * 130e9)
    assert null_residual(e) == 0.0


def test_null_space_invisibility(bronze, rng):
    """Adding a null-space field leaves the forward stress unchanged."""
    r = np.linspace(0.0, RADIUS, 15)
    for trial in range(100):
        e = random_field(rng, order=1 + trial % 4)
        g_hat = rng.uniform(-1e-3, 1e-3, e.order)
        null = null_field(g_hat / RADIUS ** (e.order - 1 - np.arange(e.order)), rng.uniform(-1e-3, 1e-3), RADIUS)
        plain = forward_stress(e, bronze, r).stress
        shifted = forward_stress(e + null, bronze, r).stress
        np.testing.assert_allclose(shifted, plain, rtol=0.0, atol=1e-10 * bronze.youngs_modulus)


def test_decomposition_recomposes_and_is_orthogonal(rng):
    """The two parts sum to the field, satisfy their constraints and are orthogonal."""
    e = random_field(rng)
    null, solenoidal = decompose_poly(e)
    assert (null + solenoidal).allclose(e, rtol=0.0, atol=1e-15)
    assert null_residual(null) < 1e-10
    assert solenoidal_residual(solenoidal) < 1e-10
    norm = np.sqrt(inner_product_poly(null, null) * inner_product_poly(solenoidal, solenoidal))
    assert abs(inner_product_poly(null, solenoidal)) < 1e-9 * norm


def test_decomposition_of_solenoidal_field():
    """eps_rr = r^3 - 1 and eps_tt = 4 r^3 - 1 on R = 1 have no null part."""
    e = AxisymPolyField(4, 1.0, [1.0, 0.0, 0.0, -1.0], [4.0, 0.0, 0.0, -1.0], [0.0, 0.0, 0.0, 0.0])
    assert solenoidal_residual(e) == 0.0
    null, solenoidal = decompose_poly(e)
    np.testing.assert_allclose(null.as_vector(), 0.0, atol=1e-12)
    assert solenoidal.allclose(e)


def test_decomposition_of_null_field():
    """A pure null-space field has no solenoidal part."""
    e = null_field([1.0, 0.0, 0.0, 0.0], 0.0, 1.0)
    null, solenoidal = decompose_poly(e)
    np.testing.assert_allclose(solenoidal.as_vector(), 0.0, atol=1e-12)
    assert null.allclose(e)


def test_field_validation():
    """Coefficient counts, order and radius are checked."""
    with pytest.raises(ConfigurationError):
        AxisymPolyField(3, 1.0, [1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(ConfigurationError):
        AxisymPolyField.zeros(0, 1.0)
    with pytest.raises(ConfigurationError):
        AxisymPolyField.zeros(2, -1.0)


def test_field_coefficients_are_read_only():
    """Coefficient arrays cannot be modified in place."""
    e = AxisymPolyField.zeros(3, 1.0)
    with pytest.raises(ValueError):
        e.f[0] = 1.0


def test_normalized_coefficients(rng):
    """Normalized coefficients survive a round trip through meter units."""
    f_hat, g_hat, h_hat = rng.standard_normal((3, 4))
    e = AxisymPolyField.from_normalized(f_hat, g_hat, h_hat, RADIUS)
    for got, want in zip(e.normalized(), (f_hat, g_hat, h_hat)):
        np.testing.assert_allclose(got, want, rtol=1e-12)
    r = np.array([0.3, 0.9]) * RADIUS
    np.testing.assert_allclose(e.evaluate(r)[:, 0], np.polyval(f_hat, r / RADIUS), rtol=1e-12)


def test_stress_profile_validation():
    """Profiles need matching lengths and positive uncertainties."""
    with pytest.raises(DataError):
        AxisymStressProfile([0.0, 1.0], [1.0], [1.0, 2.0], [1.0, 2.0])
    with pytest.raises(DataError):
        AxisymStressProfile.from_array([0.0], [[1.0, 2.0, 3.0]], [[1.0, 0.0, 1.0]])
