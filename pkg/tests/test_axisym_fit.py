"""Tests for the cylinder eigenstrain fits, with and without a fitted d0."""

import numpy as np
import pytest

from eigenstrain.axisym import AxisymPolyField, AxisymStressProfile, D0Poly, FitOptions, decompose_poly, fit_stress, fit_with_d0
from eigenstrain.axisym.decomposition import solenoidal_residual
from eigenstrain.axisym.fitting import build_parameter_map
from eigenstrain.cli_io.fixtures import synthetic_lattice, synthetic_profile
from eigenstrain.constants import MPA
from eigenstrain.errors import ConfigurationError, DataError

RADIUS = 1.5e-3
D_REF = 3.6


@pytest.fixture
def solenoidal_field():
    """Order-5 eigenstrain with its null-space part removed."""
    e = AxisymPolyField.from_normalized(
        [1.0e-3, 0.0, -2.0e-3, 0.0, -1.0e-3],
        [5.0e-3, 0.0, 1.0e-3, 0.0, -1.0e-3],
        [2.0e-3, 0.0, -1.0e-3, 0.0, 0.0],
        RADIUS,
    )
    return decompose_poly(e)[1]


def stacked(field):
    return np.concatenate(field.normalized())


def test_parameter_labels():
    """The complement search frees f_i and h_i below the constant term."""
    pm = build_parameter_map(5, FitOptions())
    assert pm.labels == ["f[1]", "f[2]", "f[3]", "f[4]", "h[1]", "h[2]", "h[3]", "h[4]"]
    assert pm.matrix.shape == (15, 8)

    no_linear = build_parameter_map(5, FitOptions(zero_linear=True))
    assert "f[4]" not in no_linear.labels and "h[4]" not in no_linear.labels

    full = build_parameter_map(5, FitOptions(exclude_null=False))
    assert "fg[5]" in full.labels
    assert len(full.labels) == 14


def test_parameter_map_spans_solenoidal_fields(rng):
    """Every parameter vector maps to a field in the orthogonal complement."""
    pm = build_parameter_map(6, FitOptions())
    field = pm.field(rng.uniform(-1e-3, 1e-3, pm.n_parameters), RADIUS)
    assert solenoidal_residual(field) < 1e-15


def test_noise_free_round_trip(bronze, solenoidal_field):
    """Fitting exact stresses at 15 radii recovers the solenoidal coefficients."""
    r = np.linspace(0.0, RADIUS, 15)
    profile = synthetic_profile(solenoidal_field, bronze, r)
    result = fit_stress(profile, 5, bronze, radius=RADIUS)
    np.testing.assert_allclose(stacked(result.field), stacked(solenoidal_field), rtol=0.0, atol=1e-9)
    assert result.max_residual < 1e-6 * np.max(np.abs(profile.stress))
    assert result.rank == 8
    assert not result.warnings
    assert not result.weighted


def test_zero_profile_fits_zero(bronze):
    """A stress-free profile gives zero coefficients."""
    r = np.linspace(0.0, RADIUS, 10)
    zeros = np.zeros(10)
    result = fit_stress(AxisymStressProfile(r, zeros, zeros, zeros), 4, bronze)
    np.testing.assert_allclose(result.parameters, 0.0, atol=1e-15)
    assert result.rms_residual == 0.0


def test_noisy_weighted_fit(bronze, solenoidal_field):
    """Weighted fits of noisy data leave residuals at the noise level."""
    r = np.linspace(0.0, RADIUS, 31)
    profile = synthetic_profile(solenoidal_field, bronze, r, noise=5.0 * MPA, uncertainty=5.0 * MPA, seed=3)
    result = fit_stress(profile, 5, bronze, radius=RADIUS)
    assert result.weighted
    assert 2.0 * MPA < result.rms_residual < 8.0 * MPA
    assert np.all(np.isfinite(result.standard_errors))
    assert np.all(result.standard_errors > 0.0)


def test_null_directions_make_design_rank_deficient(bronze, solenoidal_field):
    """Leaving the null space in the search is flagged and still fits the data."""
    r = np.linspace(0.0, RADIUS, 15)
    profile = synthetic_profile(solenoidal_field, bronze, r)
    result = fit_stress(profile, 5, bronze, FitOptions(exclude_null=False), radius=RADIUS)
    assert result.rank < len(result.labels)
    assert any("rank deficient" in w for w in result.warnings)
    assert result.max_residual < 1e-6 * np.max(np.abs(profile.stress))


def test_empty_profile(bronze):
    """No samples, no fit."""
    with pytest.raises(DataError):
        fit_stress(AxisymStressProfile([], [], [], []), 3, bronze, radius=RADIUS)


def test_d0_fit_with_constant_d0(bronze, solenoidal_field):
    """A constant d0 equal to the reference is kept."""
    r = np.linspace(0.0, RADIUS, 15)
    lattice = synthetic_lattice(solenoidal_field, bronze, D0Poly([D_REF], RADIUS, D_REF), r)
    result = fit_with_d0(lattice, 5, 0, bronze, D_REF, RADIUS)
    assert result.d0.c[0] == pytest.approx(D_REF, rel=1e-9)
    np.testing.assert_allclose(stacked(result.fit.field), stacked(solenoidal_field), rtol=0.0, atol=1e-8)


def test_d0_fit_recovers_radial_variation(bronze, solenoidal_field):
    """A quadratic d0 is found from a constant starting guess."""
    r = np.linspace(0.0, RADIUS, 21)
    truth = D0Poly([D_REF, 0.0, 1e-4 * D_REF], RADIUS, D_REF)
    lattice = synthetic_lattice(solenoidal_field, bronze, truth, r)
    result = fit_with_d0(lattice, 5, 2, bronze, D_REF, RADIUS)
    assert type(result.converged) is bool
    np.testing.assert_allclose(result.d0.evaluate(r), truth.evaluate(r), rtol=5e-6)
    assert result.cost_history[-1] <= result.cost_history[0]
    assert result.d0.is_positive(101)


def test_d0_fit_rejects_negative_order(bronze, solenoidal_field):
    """The d0 polynomial order cannot be negative."""
    r = np.linspace(0.0, RADIUS, 5)
    lattice = synthetic_lattice(solenoidal_field, bronze, D0Poly([D_REF], RADIUS, D_REF), r)
    with pytest.raises(ConfigurationError):
        fit_with_d0(lattice, 5, -1, bronze, D_REF, RADIUS)


def test_fit_of_general_field_returns_solenoidal_part(bronze, rng):
    """Data from a field with a null-space part fit to its solenoidal part."""
    f_hat, g_hat, h_hat = rng.uniform(-1e-3, 1e-3, (3, 5))
    g_hat[-1] = f_hat[-1]
    e = AxisymPolyField.from_normalized(f_hat, g_hat, h_hat, RADIUS)
    solenoidal = decompose_poly(e)[1]
    assert not solenoidal.allclose(e)

    profile = synthetic_profile(e, bronze, np.linspace(0.0, RADIUS, 15))
    result = fit_stress(profile, 5, bronze, radius=RADIUS)
    expected = stacked(solenoidal)
    np.testing.assert_allclose(stacked(result.field), expected, rtol=0.0, atol=1e-8 * np.max(np.abs(expected)))


def test_standard_errors_cover_noisy_fits(bronze, solenoidal_field):
    """Over repeated 2% noise draws the coefficients stay within three standard errors."""
    r = np.linspace(0.0, RADIUS, 15)
    exact = synthetic_profile(solenoidal_field, bronze, r)
    truth = fit_stress(exact, 5, bronze, radius=RADIUS).parameters
    noise = 0.02 * np.max(np.abs(exact.stress))

    z_scores = []
    for seed in range(50):
        profile = synthetic_profile(solenoidal_field, bronze, r, noise=noise, uncertainty=noise, seed=seed)
        result = fit_stress(profile, 5, bronze, radius=RADIUS)
        assert result.rms_residual < 1.5 * noise
        z_scores.append((result.parameters - truth) / result.standard_errors)
    z_scores = np.abs(np.array(z_scores))
    assert np.mean(z_scores < 3.0) >= 0.98
    assert np.sqrt(np.mean(z_scores ** 2)) < 1.5
