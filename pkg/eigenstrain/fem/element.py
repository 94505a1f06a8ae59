"""Trilinear hexahedral element: shape functions, quadrature and strain operator."""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import legendre

from eigenstrain.constants import DEFAULT_GAUSS_ORDER

# Reference-cube corner signs, counter-clockwise on the bottom face then the top.
NODE_SIGNS = np.array(
    [
        [-1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
    ]
)
NODES_PER_CELL = 8
DOFS_PER_CELL = 24


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre rule on the reference cube [-1, 1]^3."""

    order: int = DEFAULT_GAUSS_ORDER

    @cached_property
    def _rule(self):
        x, w = legendre.leggauss(self.order)
        # x index runs fastest
        zeta, eta, xi = np.meshgrid(x, x, x, indexing="ij")
        wz, wy, wx = np.meshgrid(w, w, w, indexing="ij")
        points = np.column_stack([xi.ravel(), eta.ravel(), zeta.ravel()])
        weights = (wx * wy * wz).ravel()
        return points, weights

    @property
    def points(self) -> np.ndarray:
        """Reference coordinates, shape (n_points, 3)."""
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        """Reference weights summing to 8."""
        return self._rule[1]

    @property
    def n_points(self) -> int:
        return self.order ** 3


def shape_functions(xi: np.ndarray) -> np.ndarray:
    """
    Evaluate the eight trilinear shape functions.

    Args:
        xi: Reference coordinates, shape (n, 3)

    Returns:
        Array of shape (n, 8)
    """
    xi = np.atleast_2d(xi)
    factors = 1.0 + xi[:, None, :] * NODE_SIGNS[None, :, :]
    return 0.125 * factors.prod(axis=2)


def shape_gradients(xi: np.ndarray) -> np.ndarray:
    """
    Reference-coordinate gradients of the shape functions.

    Args:
        xi: Reference coordinates, shape (n, 3)

    Returns:
        Array of shape (n, 8, 3)
    """
    xi = np.atleast_2d(xi)
    factors = 1.0 + xi[:, None, :] * NODE_SIGNS[None, :, :]
    grads = np.empty(factors.shape)
    for axis in range(3):
        others = [a for a in range(3) if a != axis]
        grads[:, :, axis] = 0.125 * NODE_SIGNS[None, :, axis] * factors[:, :, others[0]] * factors[:, :, others[1]]
    return grads


@lru_cache(maxsize=4)
def extrapolation_matrix(order: int = DEFAULT_GAUSS_ORDER) -> np.ndarray:
    """
    Matrix mapping values at the 2x2x2 Gauss points to the trilinear corner values.

    Only the two-point rule has as many points as corners, which makes the
    per-cell trilinear fit unique.
    """
    if order != 2:
        raise ValueError("Corner extrapolation needs the 2x2x2 rule")
    rule = QuadratureRule(order)
    return np.linalg.inv(shape_functions(rule.points))


def strain_operator(physical_gradients: np.ndarray) -> np.ndarray:
    """
    Build the strain-displacement operator for tensor-shear Voigt strain.

    Local degrees of freedom are ordered node by node, (ux, uy, uz) per node.
    Rows follow the storage order (xx, yy, zz, xy, yz, xz) and shear rows
    carry the factor 1/2 of the tensor shear component.

    Args:
        physical_gradients: Shape-function gradients, shape (n_points, 8, 3)

    Returns:
        Array of shape (n_points, 6, 24)
    """
    n_points = physical_gradients.shape[0]
    B = np.zeros((n_points, 6, DOFS_PER_CELL))
    dx = physical_gradients[:, :, 0]
    dy = physical_gradients[:, :, 1]
    dz = physical_gradients[:, :, 2]
    ux = slice(0, DOFS_PER_CELL, 3)
    uy = slice(1, DOFS_PER_CELL, 3)
    uz = slice(2, DOFS_PER_CELL, 3)
    B[:, 0, ux] = dx
    B[:, 1, uy] = dy
    B[:, 2, uz] = dz
    B[:, 3, ux] = 0.5 * dy
    B[:, 3, uy] = 0.5 * dx
    B[:, 4, uy] = 0.5 * dz
    B[:, 4, uz] = 0.5 * dy
    B[:, 5, ux] = 0.5 * dz
    B[:, 5, uz] = 0.5 * dx
    return B
