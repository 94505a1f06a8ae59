"""Tests for symmetric tensors, Hooke's law and field inner products."""

import numpy as np
import pytest

from eigenstrain.errors import ConfigurationError, MeshError, SingularModelError
from eigenstrain.fem.fields import Convention, GridTensorField
from eigenstrain.fem.mesh import build_box_mesh
from eigenstrain.tensor_core import (
    ElasticModel,
    SymTensor2,
    apply_compliance,
    apply_stiffness,
    contract,
    field_norm,
    inner_product,
    mean_stress,
    to_matrix,
)

IDENTITY = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])


def test_hydrostatic_strain_stress(bronze):
    """Isotropic strain gives E/(1-2nu) times the strain on the diagonal."""
    sigma = apply_stiffness(SymTensor2.identity(1e-3), bronze)
    np.testing.assert_allclose(sigma.to_array(), 406.25e6 * IDENTITY, rtol=1e-12)


def test_shear_strain_stress(bronze):
    """Tensor shear s maps to sigma_xy = E s / (1 + nu) and nothing else."""
    s = 2e-4
    sigma = apply_stiffness(SymTensor2(xy=s), bronze)
    expected = np.zeros(6)
    expected[3] = 130e9 * s / 1.34
    np.testing.assert_allclose(sigma.to_array(), expected, rtol=1e-12, atol=1e-6)


def test_uniaxial_compliance(inconel):
    """Uniaxial stress contracts the transverse directions by nu."""
    eps = apply_compliance(np.array([100e6, 0.0, 0.0, 0.0, 0.0, 0.0]), inconel)
    E = 208e9
    np.testing.assert_allclose(eps[:3], [100e6 / E, -0.28 * 100e6 / E, -0.28 * 100e6 / E], rtol=1e-12)
    assert np.all(eps[3:] == 0.0)


def test_compliance_inverts_stiffness(bronze, rng):
    """Random strains survive a stiffness then compliance round trip."""
    eps = rng.standard_normal((50, 6)) * 1e-3
    back = apply_compliance(apply_stiffness(eps, bronze), bronze)
    np.testing.assert_allclose(back, eps, rtol=0.0, atol=1e-12 * np.max(np.abs(eps)))
    np.testing.assert_allclose(bronze.stiffness_matrix @ bronze.compliance_matrix, np.eye(6), atol=1e-12)


def test_stiffness_matrix_matches_apply(inconel, rng):
    """The 6x6 matrix and the pointwise law agree."""
    eps = rng.standard_normal(6)
    np.testing.assert_allclose(inconel.stiffness_matrix @ eps, apply_stiffness(eps, inconel), rtol=1e-12)


@pytest.mark.parametrize("nu", [0.5, -1.0])
def test_singular_poisson_ratio(nu):
    """nu = 0.5 and nu = -1 make the stiffness singular."""
    with pytest.raises(SingularModelError):
        ElasticModel(100e9, nu)


@pytest.mark.parametrize("E, nu", [(0.0, 0.3), (-1e9, 0.3), (100e9, 0.7)])
def test_invalid_elastic_constants(E, nu):
    """Non-positive moduli and out-of-range ratios are configuration errors."""
    with pytest.raises(ConfigurationError):
        ElasticModel(E, nu)


def test_moduli(bronze):
    """Lame constants and bulk modulus follow from E and nu."""
    E, nu = 130e9, 0.34
    assert bronze.shear_modulus == pytest.approx(E / (2 * (1 + nu)))
    assert bronze.lame_lambda == pytest.approx(E * nu / ((1 + nu) * (1 - 2 * nu)))
    assert bronze.bulk_modulus == pytest.approx(bronze.lame_lambda + 2.0 * bronze.shear_modulus / 3.0)


def test_sym_tensor_matrix_round_trip():
    """Voigt and matrix forms describe the same tensor."""
    t = SymTensor2(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    matrix = t.to_matrix()
    np.testing.assert_array_equal(matrix, matrix.T)
    assert matrix[0, 1] == 4.0 and matrix[1, 2] == 5.0 and matrix[0, 2] == 6.0
    assert SymTensor2.from_matrix(matrix) == t
    assert t.trace == 6.0


def test_contraction_counts_shear_twice():
    """a:b sums every matrix entry, so off-diagonal terms enter twice."""
    a = np.array([1.0, 2.0, 3.0, 0.5, -1.0, 2.0])
    b = np.array([0.3, -2.0, 1.0, 4.0, 0.25, -0.5])
    assert contract(a, b) == pytest.approx(np.sum(to_matrix(a) * to_matrix(b)))


def test_constant_identity_inner_product():
    """I:I = 3 integrated over the cube of side 2 gives 24."""
    mesh = build_box_mesh(1.0, 2)
    field = GridTensorField.constant(mesh, IDENTITY)
    assert inner_product(field, field) == pytest.approx(24.0, rel=1e-12)
    assert field_norm(field) == pytest.approx(np.sqrt(24.0), rel=1e-12)


def test_inner_product_symmetric_and_bilinear(unit_mesh, inconel, rng):
    """The energy product is symmetric and linear in each argument."""
    a = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_nodes, 6)))
    b = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_cells * 8, 6)), Convention.GAUSS)
    c = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_nodes, 6)))

    ab = inner_product(a, b, inconel)
    assert inner_product(b, a, inconel) == pytest.approx(ab, rel=1e-12)
    combined = inner_product(2.5 * a + c, b, inconel)
    assert combined == pytest.approx(2.5 * ab + inner_product(c, b, inconel), rel=1e-10)


def test_inner_product_rejects_mesh_mismatch(unit_mesh):
    """Fields on different meshes cannot be paired."""
    other = build_box_mesh(1.0, 2)
    with pytest.raises(MeshError):
        inner_product(GridTensorField.zeros(unit_mesh), GridTensorField.zeros(other))


def test_mean_of_constant_field(unit_mesh):
    """The volume average of c I is c I."""
    field = GridTensorField.constant(unit_mesh, 7.5 * IDENTITY)
    np.testing.assert_allclose(mean_stress(field).to_array(), 7.5 * IDENTITY, rtol=1e-12, atol=1e-12)
