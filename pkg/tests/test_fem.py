"""Tests for box meshes, grid fields and the finite-element solves."""

from unittest.mock import patch

import numpy as np
import pytest
from scipy import sparse

from eigenstrain.config import settings
from eigenstrain.errors import MeshError, SolverConvergenceError
from eigenstrain.fem.assembly import assemble_operator, element_matrix, null_mode_count
from eigenstrain.fem.element import QuadratureRule
from eigenstrain.fem.fields import Convention, GridTensorField, GridVectorField
from eigenstrain.fem.incompatibility import incompatibility
from eigenstrain.fem.mesh import build_box_mesh
from eigenstrain.fem.solver import (
    DecompositionMode,
    conjugate_gradient,
    forward_solve,
    helmholtz_decompose,
)
from eigenstrain.tensor_core import field_norm, inner_product, mean_stress, metric_matrix


def quadratic_displacement(points):
    x, y, z = points.T
    return 1e-3 * np.column_stack([x ** 2, x * y, z ** 2])


def quadratic_strain(points):
    """Symmetric gradient of ``quadratic_displacement``."""
    x, y, z = points.T
    zero = np.zeros_like(x)
    return 1e-3 * np.column_stack([2 * x, x, 2 * z, 0.5 * y, zero, zero])


def bubble_displacement(points, L=1.0):
    """Smooth displacement vanishing on the faces of [-L, L]^3."""
    bubble = np.prod((points ** 2 - L ** 2) / L ** 2, axis=1)
    return 1e-3 * bubble[:, None] * np.column_stack([1.0 + points[:, 1], 0.5 - points[:, 2], points[:, 0]])


def test_mesh_counts():
    """Two cells per axis give 27 nodes and 8 cells."""
    mesh = build_box_mesh((1.0, 1.0, 1.0), (2, 2, 2))
    assert mesh.n_nodes == 27
    assert mesh.n_cells == 8
    assert mesh.connectivity.shape == (8, 8)


def test_mesh_spacing_on_cube_sample():
    """Eight cells across a 17 mm cube are 2.125 mm wide."""
    mesh = build_box_mesh(8.5e-3, 8)
    np.testing.assert_allclose(mesh.spacing, [2.125e-3] * 3, rtol=1e-12)


def test_mesh_node_order_is_x_fastest():
    """Node i + (nx+1)(j + (ny+1)k) sits at grid position (i, j, k)."""
    mesh = build_box_mesh((1.0, 2.0, 3.0), (2, 3, 4))
    node = mesh.node_index(1, 2, 3)
    np.testing.assert_allclose(mesh.nodes[node], [0.0, 2.0 / 3.0, 1.5], atol=1e-12)
    assert mesh.nodes[1, 0] > mesh.nodes[0, 0]


@pytest.mark.parametrize("cells", [(1, 2, 2), (2, 0, 2)])
def test_degenerate_mesh(cells):
    """Fewer than two cells on an axis is rejected."""
    with pytest.raises(MeshError):
        build_box_mesh(1.0, cells)


def test_quadrature_weights():
    """Gauss weights integrate the reference cube volume."""
    rule = QuadratureRule()
    assert rule.n_points == 8
    assert np.sum(rule.weights) == pytest.approx(8.0)


def test_nodal_field_reproduces_trilinear_function(unit_mesh, rng):
    """Interpolation is exact for trilinear functions at arbitrary points."""
    def trilinear(points):
        x, y, z = points.T
        value = 1.0 + 2.0 * x - y + 0.5 * z + x * y - 3.0 * x * y * z
        return np.tile(value[:, None], (1, 6))

    field = GridTensorField.from_function(unit_mesh, trilinear, Convention.NODAL)
    points = rng.uniform(-1.0, 1.0, (40, 3))
    np.testing.assert_allclose(field.evaluate(points), trilinear(points), atol=1e-12)
    np.testing.assert_allclose(field.to_gauss().evaluate(points), trilinear(points), atol=1e-12)


def test_field_shape_is_checked(unit_mesh):
    """Values must match the node or Gauss-point count."""
    with pytest.raises(MeshError):
        GridTensorField(unit_mesh, np.zeros((10, 6)))


def test_mixed_conventions_combine_at_gauss_points(unit_mesh):
    """Adding a nodal and a Gauss field gives a Gauss field."""
    nodal = GridTensorField.constant(unit_mesh, np.ones(6))
    gauss = GridTensorField.constant(unit_mesh, np.ones(6), Convention.GAUSS)
    total = nodal + gauss
    assert total.convention is Convention.GAUSS
    np.testing.assert_allclose(total.values, 2.0)


def test_symmetric_gradient_of_linear_displacement(unit_mesh):
    """A linear displacement has a constant, exact symmetric gradient."""
    A = np.array([[1.0, 2.0, 0.0], [0.0, -1.0, 4.0], [3.0, 0.0, 0.5]])
    U = GridVectorField.from_function(unit_mesh, lambda p: p @ A.T)
    strain = U.symmetric_gradient()
    sym = 0.5 * (A + A.T)
    expected = [sym[0, 0], sym[1, 1], sym[2, 2], sym[0, 1], sym[1, 2], sym[0, 2]]
    np.testing.assert_allclose(strain.values, np.tile(expected, (strain.values.shape[0], 1)), atol=1e-12)


def test_operator_null_space(inconel):
    """The free-boundary operators have exactly the six rigid-body null modes."""
    mesh = build_box_mesh(1.0, 2)
    assert null_mode_count(assemble_operator(mesh, metric_matrix(inconel))) == 6
    assert null_mode_count(assemble_operator(mesh, metric_matrix(None))) == 6


def test_operator_is_symmetric(inconel):
    """Element and global operators are symmetric."""
    mesh = build_box_mesh((1.0, 0.5, 2.0), (2, 3, 2))
    Ke = element_matrix(mesh, metric_matrix(inconel))
    np.testing.assert_allclose(Ke, Ke.T, atol=1e-9 * np.max(np.abs(Ke)))
    K = assemble_operator(mesh, metric_matrix(inconel))
    assert abs(K - K.T).max() <= 1e-9 * abs(K).max()


def test_conjugate_gradient_small_system():
    """CG matches a direct solve on a small SPD system."""
    A = sparse.csr_matrix(np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]]))
    b = np.array([1.0, 2.0, 3.0])
    x, info = conjugate_gradient(A.dot, b, 1.0 / A.diagonal(), 1e-12, 50)
    np.testing.assert_allclose(x, np.linalg.solve(A.toarray(), b), rtol=1e-10)
    assert info.converged
    assert info.final_residual <= 1e-12


def test_conjugate_gradient_reports_non_convergence():
    """Running out of iterations is recorded, not hidden."""
    A = sparse.diags(np.linspace(1.0, 100.0, 50)).tocsr()
    _, info = conjugate_gradient(A.dot, np.ones(50), np.ones(50), 1e-14, 2)
    assert not info.converged
    assert info.iterations == 2


def test_solver_raises_with_history(unit_mesh, inconel):
    """An exhausted iteration budget raises with the residual history."""
    eps = GridTensorField.from_function(unit_mesh, quadratic_strain)
    with patch.object(settings, "CG_MAX_ITER_FACTOR", 0):
        with pytest.raises(SolverConvergenceError) as excinfo:
            forward_solve(eps, inconel, unit_mesh)
    assert excinfo.value.residual_history


def test_uniform_eigenstrain_is_stress_free(unit_mesh, inconel):
    """Uniform eigenstrain is exactly compatible, so no stress arises."""
    eps = GridTensorField.constant(unit_mesh, 1e-3 * np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]), Convention.GAUSS)
    result = forward_solve(eps, inconel, unit_mesh)
    assert result.stress.max_abs() < 1e-10 * inconel.youngs_modulus
    assert result.info.converged


def test_discrete_gradient_is_invisible(unit_mesh, inconel):
    """Adding the symmetric gradient of a mesh displacement leaves the stress unchanged."""
    def base(points):
        x, y, z = points.T
        return 1e-3 * np.column_stack([y ** 2, z ** 2, x ** 2, x * z, 0.0 * x, y])

    eps = GridTensorField.from_function(unit_mesh, base)
    gradient = GridVectorField.from_function(unit_mesh, quadratic_displacement).symmetric_gradient()
    plain = forward_solve(eps, inconel, unit_mesh).stress
    shifted = forward_solve(eps + gradient, inconel, unit_mesh).stress
    assert np.max(np.abs(shifted.values - plain.values)) < 1e-9 * inconel.youngs_modulus
    assert plain.max_abs() > 1e-6 * inconel.youngs_modulus


def test_forward_stress_has_zero_mean(unit_mesh, inconel, rng):
    """Weak equilibrium against linear test fields forces a zero mean stress."""
    values = rng.standard_normal((unit_mesh.n_cells * 8, 6)) * 1e-3
    sigma = forward_solve(GridTensorField(unit_mesh, values, Convention.GAUSS), inconel, unit_mesh).stress
    mean = np.max(np.abs(mean_stress(sigma).to_array()))
    assert mean < 1e-8 * sigma.max_abs()


def test_smooth_gradient_converges_to_zero_stress(inconel):
    """Analytic gradients of a quadratic displacement lose their stress under refinement."""
    errors = []
    for cells in (4, 8):
        mesh = build_box_mesh(1.0, cells)
        eps = GridTensorField.from_function(mesh, quadratic_strain)
        sigma = forward_solve(eps, inconel, mesh).stress
        errors.append(field_norm(sigma) / (inconel.youngs_modulus * field_norm(eps)))
    assert errors[1] < errors[0]


@pytest.mark.slow
def test_smooth_gradient_convergence_rate(inconel):
    """Halving the cell size at least halves the spurious stress, roughly."""
    errors = []
    for cells in (8, 16):
        mesh = build_box_mesh(1.0, cells)
        eps = GridTensorField.from_function(mesh, quadratic_strain)
        sigma = forward_solve(eps, inconel, mesh).stress
        errors.append(field_norm(sigma) / (inconel.youngs_modulus * field_norm(eps)))
    assert errors[1] < 0.75 * errors[0]


def test_helmholtz_parts_recompose(unit_mesh, rng):
    """Potential and solenoidal parts sum to the input."""
    eps = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_cells * 8, 6)), Convention.GAUSS)
    split = helmholtz_decompose(eps, unit_mesh, DecompositionMode.ZERO_FLUX)
    np.testing.assert_allclose((split.potential + split.solenoidal).values, eps.values, atol=1e-13)


@pytest.mark.parametrize("mode", list(DecompositionMode))
def test_helmholtz_parts_are_orthogonal(unit_mesh, rng, mode):
    """The remainder is Galerkin-orthogonal to the symmetric gradient."""
    eps = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_cells * 8, 6)), Convention.GAUSS)
    split = helmholtz_decompose(eps, unit_mesh, mode)
    product = inner_product(split.potential, split.solenoidal)
    assert abs(product) < 1e-8 * field_norm(split.potential) * field_norm(split.solenoidal)


def test_energy_weighted_split_is_energy_orthogonal(unit_mesh, inconel, rng):
    """With the stiffness weight the parts are orthogonal in the energy product."""
    eps = GridTensorField(unit_mesh, rng.standard_normal((unit_mesh.n_nodes, 6)))
    split = helmholtz_decompose(eps, unit_mesh, DecompositionMode.ZERO_FLUX, weight=inconel)
    product = inner_product(split.potential, split.solenoidal, inconel)
    norms = field_norm(split.potential, inconel) * field_norm(split.solenoidal, inconel)
    assert abs(product) < 1e-8 * norms


def test_pure_potential_has_no_solenoidal_part(unit_mesh):
    """A boundary-vanishing gradient is all potential under the clamped split."""
    eps = GridVectorField.from_function(unit_mesh, bubble_displacement).symmetric_gradient()
    split = helmholtz_decompose(eps, unit_mesh, DecompositionMode.ZERO_DISPLACEMENT)
    assert split.solenoidal.max_abs() < 1e-8 * eps.max_abs()
    boundary = unit_mesh.boundary_nodes
    assert np.all(split.displacement.values[boundary] == 0.0)


def test_solver_rejects_foreign_field(unit_mesh, inconel):
    """Fields must live on the solver mesh."""
    other = build_box_mesh(1.0, 2)
    with pytest.raises(MeshError):
        forward_solve(GridTensorField.zeros(other, Convention.GAUSS), inconel, unit_mesh)


def test_incompatibility_of_zero_field(unit_mesh):
    """Zero strain is compatible; boundary nodes carry NaN."""
    eta = incompatibility(GridTensorField.zeros(unit_mesh), unit_mesh)
    interior = ~unit_mesh.boundary_nodes
    assert np.all(eta.values[interior] == 0.0)
    assert np.all(np.isnan(eta.values[unit_mesh.boundary_nodes]))


def test_incompatibility_of_gradient(unit_mesh):
    """The gradient of a quadratic displacement is compatible."""
    eps = GridTensorField.from_function(unit_mesh, quadratic_strain, Convention.NODAL)
    eta = incompatibility(eps, unit_mesh)
    assert np.nanmax(np.abs(eta.values)) < 1e-12


def test_incompatibility_of_bent_strain(unit_mesh):
    """eps_xx = c y^2 has eta_zz = 2c and no other component."""
    c = 3e-4

    def bent(points):
        values = np.zeros((len(points), 6))
        values[:, 0] = c * points[:, 1] ** 2
        return values

    eta = incompatibility(GridTensorField.from_function(unit_mesh, bent, Convention.NODAL), unit_mesh)
    interior = eta.values[~unit_mesh.boundary_nodes]
    np.testing.assert_allclose(interior[:, 2], 2.0 * c, rtol=1e-9)
    np.testing.assert_allclose(np.delete(interior, 2, axis=1), 0.0, atol=1e-12)


def test_incompatibility_needs_four_cells():
    """Second-difference stencils need at least four cells per axis."""
    mesh = build_box_mesh(1.0, (4, 4, 3))
    with pytest.raises(MeshError):
        incompatibility(GridTensorField.zeros(mesh), mesh)
