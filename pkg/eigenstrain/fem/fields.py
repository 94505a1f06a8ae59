"""Tensor and vector fields sampled on a box mesh."""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from eigenstrain.constants import DEFAULT_GAUSS_ORDER, N_VOIGT
from eigenstrain.errors import MeshError
from eigenstrain.fem.element import (
    QuadratureRule,
    extrapolation_matrix,
    shape_functions,
)
from eigenstrain.fem.mesh import BoxMesh


class Convention(str, Enum):
    """Where the samples of a grid field live."""

    NODAL = "nodal"
    GAUSS = "gauss"


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64, copy=True)
    values.setflags(write=False)
    return values


def _scatter_to_nodes(mesh: BoxMesh, corner_values: np.ndarray) -> np.ndarray:
    """Average per-cell corner values over the cells sharing each node."""
    conn = mesh.connectivity.ravel()
    counts = np.bincount(conn, minlength=mesh.n_nodes).astype(float)
    flat = corner_values.reshape(-1, corner_values.shape[-1])
    summed = np.column_stack(
        [np.bincount(conn, weights=flat[:, c], minlength=mesh.n_nodes) for c in range(flat.shape[1])]
    )
    return summed / counts[:, None]


@dataclass(frozen=True, eq=False)
class GridTensorField:
    """
    Symmetric tensor field on a box mesh in Voigt storage (xx, yy, zz, xy, yz, xz).

    Nodal fields hold one value per mesh node and are interpolated trilinearly.
    Gauss fields hold one value per 2x2x2 quadrature point, cell-major; inside
    each cell they define the unique trilinear polynomial through the eight
    samples, so they may jump across cell faces.
    """

    mesh: BoxMesh
    values: np.ndarray
    convention: Convention = Convention.NODAL

    def __post_init__(self):
        convention = Convention(self.convention)
        values = _readonly(self.values)
        expected = self.mesh.n_nodes if convention is Convention.NODAL else self.mesh.n_cells * DEFAULT_GAUSS_ORDER ** 3
        if values.shape != (expected, N_VOIGT):
            raise MeshError(
                f"{convention.value} tensor field needs shape ({expected}, {N_VOIGT}), got {values.shape}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "convention", convention)

    @classmethod
    def zeros(cls, mesh: BoxMesh, convention: Convention = Convention.NODAL) -> "GridTensorField":
        n = mesh.n_nodes if Convention(convention) is Convention.NODAL else mesh.n_cells * DEFAULT_GAUSS_ORDER ** 3
        return cls(mesh, np.zeros((n, N_VOIGT)), convention)

    @classmethod
    def from_function(
        cls,
        mesh: BoxMesh,
        func: Callable[[np.ndarray], np.ndarray],
        convention: Convention = Convention.GAUSS,
    ) -> "GridTensorField":
        """
        Sample an analytic field.

        Args:
            mesh: Target mesh
            func: Maps points of shape (n, 3) to Voigt values of shape (n, 6)
            convention: Sample at nodes or at Gauss points
        """
        points = sample_points(mesh, convention)
        return cls(mesh, np.asarray(func(points), dtype=float).reshape(len(points), N_VOIGT), convention)

    @classmethod
    def constant(cls, mesh: BoxMesh, tensor, convention: Convention = Convention.NODAL) -> "GridTensorField":
        value = np.asarray(tensor, dtype=float).reshape(N_VOIGT)
        return cls.from_function(mesh, lambda p: np.tile(value, (len(p), 1)), convention)

    @property
    def points(self) -> np.ndarray:
        """Coordinates of the samples."""
        return sample_points(self.mesh, self.convention)

    def corner_values(self) -> np.ndarray:
        """Per-cell trilinear corner values, shape (n_cells, 8, 6)."""
        if self.convention is Convention.NODAL:
            return self.values[self.mesh.connectivity]
        gauss = self.values.reshape(self.mesh.n_cells, 8, N_VOIGT)
        return np.einsum("ag,cgk->cak", extrapolation_matrix(DEFAULT_GAUSS_ORDER), gauss)

    def at_quadrature(self, rule: Optional[QuadratureRule] = None) -> np.ndarray:
        """Values at the quadrature points of every cell, shape (n_cells, n_points, 6)."""
        rule = rule or QuadratureRule()
        if self.convention is Convention.GAUSS and rule.order == DEFAULT_GAUSS_ORDER:
            return self.values.reshape(self.mesh.n_cells, rule.n_points, N_VOIGT)
        N = shape_functions(rule.points)
        return np.einsum("qa,cak->cqk", N, self.corner_values())

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Interpolate the field at arbitrary points inside the box, shape (n, 6)."""
        cells, local = self.mesh.locate(points)
        N = shape_functions(local)
        return np.einsum("na,nak->nk", N, self.corner_values()[cells])

    def to_nodal(self) -> "GridTensorField":
        """Nodal field averaging the per-cell corner values of adjacent cells."""
        if self.convention is Convention.NODAL:
            return self
        return GridTensorField(self.mesh, _scatter_to_nodes(self.mesh, self.corner_values()), Convention.NODAL)

    def to_gauss(self) -> "GridTensorField":
        """Field sampled at the 2x2x2 Gauss points."""
        if self.convention is Convention.GAUSS:
            return self
        values = self.at_quadrature(QuadratureRule(DEFAULT_GAUSS_ORDER))
        return GridTensorField(self.mesh, values.reshape(-1, N_VOIGT), Convention.GAUSS)

    def map_values(self, func: Callable[[np.ndarray], np.ndarray]) -> "GridTensorField":
        """Apply a pointwise map to the stored values."""
        return GridTensorField(self.mesh, func(self.values), self.convention)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def _check_compatible(self, other: "GridTensorField"):
        if other.mesh != self.mesh:
            raise MeshError("Fields live on different meshes", left=self.mesh.cells, right=other.mesh.cells)

    def _combine(self, other: "GridTensorField", op) -> "GridTensorField":
        self._check_compatible(other)
        if other.convention is self.convention:
            return GridTensorField(self.mesh, op(self.values, other.values), self.convention)
        return GridTensorField(self.mesh, op(self.to_gauss().values, other.to_gauss().values), Convention.GAUSS)

    def __add__(self, other: "GridTensorField") -> "GridTensorField":
        return self._combine(other, np.add)

    def __sub__(self, other: "GridTensorField") -> "GridTensorField":
        return self._combine(other, np.subtract)

    def __neg__(self) -> "GridTensorField":
        return GridTensorField(self.mesh, -self.values, self.convention)

    def __mul__(self, scalar: float) -> "GridTensorField":
        return GridTensorField(self.mesh, float(scalar) * self.values, self.convention)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class GridVectorField:
    """Vector field (typically displacement) stored at mesh nodes."""

    mesh: BoxMesh
    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != (self.mesh.n_nodes, 3):
            raise MeshError(f"vector field needs shape ({self.mesh.n_nodes}, 3), got {values.shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, mesh: BoxMesh) -> "GridVectorField":
        return cls(mesh, np.zeros((mesh.n_nodes, 3)))

    @classmethod
    def from_dofs(cls, mesh: BoxMesh, dofs: np.ndarray) -> "GridVectorField":
        return cls(mesh, np.asarray(dofs).reshape(mesh.n_nodes, 3))

    @classmethod
    def from_function(cls, mesh: BoxMesh, func: Callable[[np.ndarray], np.ndarray]) -> "GridVectorField":
        return cls(mesh, np.asarray(func(mesh.nodes), dtype=float).reshape(mesh.n_nodes, 3))

    @property
    def dofs(self) -> np.ndarray:
        return self.values.ravel()

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        cells, local = self.mesh.locate(points)
        N = shape_functions(local)
        return np.einsum("na,nak->nk", N, self.values[self.mesh.connectivity][cells])

    def symmetric_gradient(self) -> GridTensorField:
        """Exact symmetric gradient of the trilinear interpolant, at Gauss points."""
        B, _ = self.mesh.rule_data()
        local = self.dofs[self.mesh.dof_map]
        strain = np.einsum("qkd,cd->cqk", B, local)
        return GridTensorField(self.mesh, strain.reshape(-1, N_VOIGT), Convention.GAUSS)


def sample_points(mesh: BoxMesh, convention: Union[Convention, str]) -> np.ndarray:
    """Coordinates at which a field of the given convention is sampled."""
    if Convention(convention) is Convention.NODAL:
        return mesh.nodes
    return mesh.quadrature_points(QuadratureRule(DEFAULT_GAUSS_ORDER)).reshape(-1, 3)
