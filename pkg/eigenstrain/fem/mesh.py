"""Structured box meshes of trilinear hexahedra."""

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np
import structlog

from eigenstrain.constants import MIN_CELLS_PER_AXIS
from eigenstrain.errors import MeshError
from eigenstrain.fem.element import (
    DOFS_PER_CELL,
    QuadratureRule,
    shape_gradients,
    strain_operator,
)

logger = structlog.get_logger()


@dataclass(frozen=True)
class BoxMesh:
    """
    Regular hexahedral grid on the box [-Lx, Lx] x [-Ly, Ly] x [-Lz, Lz].

    Nodes are numbered lexicographically with x fastest:
    ``node = i + (nx + 1) * (j + (ny + 1) * k)``. Cells are numbered the same
    way over cell indices, and each cell lists its corners in the reference
    order of ``NODE_SIGNS``.
    """

    half_size: Tuple[float, float, float]
    cells: Tuple[int, int, int]

    def __post_init__(self):
        half_size = tuple(float(v) for v in self.half_size)
        cells = tuple(int(v) for v in self.cells)
        errors = []
        if len(half_size) != 3 or len(cells) != 3:
            errors.append("half_size and cells need one entry per axis")
        else:
            if any(not np.isfinite(v) or v <= 0.0 for v in half_size):
                errors.append(f"half sizes must be positive, got {half_size}")
            if any(n < MIN_CELLS_PER_AXIS for n in cells):
                errors.append(f"need at least {MIN_CELLS_PER_AXIS} cells per axis, got {cells}")
        if errors:
            raise MeshError("; ".join(errors), half_size=list(half_size), cells=list(cells))
        object.__setattr__(self, "half_size", half_size)
        object.__setattr__(self, "cells", cells)

    @property
    def node_dims(self) -> Tuple[int, int, int]:
        nx, ny, nz = self.cells
        return nx + 1, ny + 1, nz + 1

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.node_dims))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes

    @cached_property
    def spacing(self) -> np.ndarray:
        """Cell edge lengths (hx, hy, hz)."""
        return 2.0 * np.asarray(self.half_size) / np.asarray(self.cells)

    @property
    def volume(self) -> float:
        return float(np.prod(2.0 * np.asarray(self.half_size)))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Node coordinates along each axis."""
        return tuple(
            np.linspace(-L, L, n + 1) for L, n in zip(self.half_size, self.cells)
        )

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (n_nodes, 3)."""
        xs, ys, zs = self.axes
        Z, Y, X = np.meshgrid(zs, ys, xs, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    @cached_property
    def connectivity(self) -> np.ndarray:
        """Corner node indices per cell, shape (n_cells, 8)."""
        nx, ny, nz = self.cells
        sx, sy = nx + 1, (nx + 1) * (ny + 1)
        ck, cj, ci = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
        base = (ci + sx * cj + sy * ck).ravel()
        offsets = np.array([0, 1, 1 + sx, sx, sy, sy + 1, sy + 1 + sx, sy + sx])
        return base[:, None] + offsets[None, :]

    @cached_property
    def dof_map(self) -> np.ndarray:
        """Global degree-of-freedom indices per cell, shape (n_cells, 24)."""
        conn = self.connectivity
        return (3 * conn[:, :, None] + np.arange(3)[None, None, :]).reshape(self.n_cells, DOFS_PER_CELL)

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        """Boolean mask of nodes on the box surface."""
        nx, ny, nz = self.cells
        k, j, i = np.meshgrid(np.arange(nz + 1), np.arange(ny + 1), np.arange(nx + 1), indexing="ij")
        mask = (i == 0) | (i == nx) | (j == 0) | (j == ny) | (k == 0) | (k == nz)
        return mask.ravel()

    @cached_property
    def cell_centers(self) -> np.ndarray:
        return self.nodes[self.connectivity].mean(axis=1)

    def node_index(self, i: int, j: int, k: int) -> int:
        """Global index of grid node (i, j, k)."""
        nx, ny, _ = self.cells
        return i + (nx + 1) * (j + (ny + 1) * k)

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """Boolean mask of points inside the closed box, with a relative tolerance."""
        points = np.atleast_2d(points)
        bound = np.asarray(self.half_size) * (1.0 + tol)
        return np.all(np.abs(points) <= bound, axis=1)

    def locate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Find the owning cell and reference coordinates of points.

        Points on shared faces belong to the cell on their lower side except at
        the upper box faces. Points outside the box are clamped to the nearest
        cell and get reference coordinates outside [-1, 1].

        Args:
            points: Physical coordinates, shape (n, 3)

        Returns:
            Tuple of (cell indices, reference coordinates of shape (n, 3))
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        L = np.asarray(self.half_size)
        h = self.spacing
        cells = np.asarray(self.cells)
        scaled = (points + L) / h
        index = np.clip(np.floor(scaled).astype(np.int64), 0, cells - 1)
        local = 2.0 * (scaled - index) - 1.0
        nx, ny, _ = self.cells
        cell = index[:, 0] + nx * (index[:, 1] + ny * index[:, 2])
        return cell, local

    @cached_property
    def _default_rule_data(self):
        return self._rule_data(QuadratureRule())

    def rule_data(self, rule: QuadratureRule = None):
        """
        Strain operator and integration weights of a quadrature rule.

        Every cell shares the same diagonal Jacobian, so the operator is
        computed once per rule.

        Returns:
            Tuple of (B of shape (n_points, 6, 24), weights times det J)
        """
        if rule is None or rule == QuadratureRule():
            return self._default_rule_data
        return self._rule_data(rule)

    def _rule_data(self, rule: QuadratureRule):
        h = self.spacing
        gradients = shape_gradients(rule.points) * (2.0 / h)[None, None, :]
        B = strain_operator(gradients)
        weights = rule.weights * self.cell_volume / 8.0
        return B, weights

    def quadrature_points(self, rule: QuadratureRule = None) -> np.ndarray:
        """Physical quadrature point coordinates, shape (n_cells, n_points, 3)."""
        rule = rule or QuadratureRule()
        offsets = 0.5 * rule.points * self.spacing[None, :]
        return self.cell_centers[:, None, :] + offsets[None, :, :]


def build_box_mesh(half_size: Sequence[float], cells: Sequence[int]) -> BoxMesh:
    """
    Build a regular box mesh.

    Args:
        half_size: Half extents (Lx, Ly, Lz) in meters; a scalar gives a cube
        cells: Cells per axis (nx, ny, nz); a scalar is used on every axis

    Returns:
        The mesh

    Raises:
        MeshError: If any axis has fewer than two cells or a non-positive size
    """
    if np.isscalar(half_size):
        half_size = (half_size,) * 3
    if np.isscalar(cells):
        cells = (cells,) * 3
    mesh = BoxMesh(tuple(half_size), tuple(cells))
    logger.debug("Built box mesh", cells=mesh.cells, nodes=mesh.n_nodes)
    return mesh
