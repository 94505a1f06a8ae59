"""Diagonal Maxwell stress potentials on a symmetric cube."""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np
import structlog

from eigenstrain.constants import N_VOIGT, VOIGT_LABELS
from eigenstrain.errors import ConfigurationError
from eigenstrain.maxwell.polynomial import Poly3, stack_coefficients
from eigenstrain.tensor_core import SymTensor2

logger = structlog.get_logger()

# (xi^2 - 1)^2 in ascending powers
PHI_FACTOR = (1.0, 0.0, -2.0, 0.0, 1.0)

# Voigt columns of the rows of sigma, for divergence and traction
TENSOR_ROWS = ((0, 3, 5), (3, 1, 4), (5, 4, 2))


def plane_term_exponents(count: int) -> List[Tuple[int, int]]:
    """
    Exponents (a, b) of e1^a e2^b, ordered by degree a + 2b.

    The sequence starts 1, e1, e1^2, e2, e1^3, e1 e2, e1^4, e1^2 e2, e2^2.
    """
    exponents = []
    degree = 0
    while len(exponents) < count:
        for k in range(degree // 2 + 1):
            exponents.append((degree - 2 * k, k))
        degree += 1
    return exponents[:count]


def phi(half_size: float) -> Poly3:
    """Boundary factor ((x/L)^2 - 1)^2 ((y/L)^2 - 1)^2 ((z/L)^2 - 1)^2."""
    return Poly3.separable(PHI_FACTOR, PHI_FACTOR, PHI_FACTOR, half_size)


def elementary_symmetric(half_size: float) -> Tuple[Poly3, Poly3]:
    """e1 = (x^2 + y^2)/L^2 and e2 = x^2 y^2 / L^4."""
    e1 = Poly3.monomial(2, 0, 0, half_size) + Poly3.monomial(0, 2, 0, half_size)
    e2 = Poly3.monomial(2, 2, 0, half_size)
    return e1, e2


def stress_from_lambdas(lx: Poly3, ly: Poly3, lz: Poly3) -> List[Poly3]:
    """
    Stress components of a diagonal potential, in Voigt order.

    sigma_xx = Lz,yy + Ly,zz; sigma_yy = Lx,zz + Lz,xx; sigma_zz = Ly,xx + Lx,yy;
    sigma_xy = -Lz,xy; sigma_yz = -Lx,yz; sigma_xz = -Ly,xz.
    """
    return [
        ly.d(2, 2) + lz.d(1, 1),
        lx.d(2, 2) + lz.d(0, 0),
        lx.d(1, 1) + ly.d(0, 0),
        -lz.d(0, 1),
        -lx.d(1, 2),
        -ly.d(0, 2),
    ]


@dataclass(frozen=True)
class BasisElement:
    """One potential of the symmetric basis: Phi (z/L)^(2i) times plane term j."""

    kind: str
    i: int
    j: int

    @property
    def label(self) -> str:
        return f"{self.kind}[{self.i}][{self.j}]"


def basis_elements(z_order: int, plane_terms: int) -> List[BasisElement]:
    """All elements, the a's (in-plane potential) before the b's (axial potential)."""
    return [
        BasisElement(kind, i, j)
        for kind in ("a", "b")
        for i in range(z_order)
        for j in range(plane_terms)
    ]


def element_potential(element: BasisElement, half_size: float) -> Poly3:
    e1, e2 = elementary_symmetric(half_size)
    a, b = plane_term_exponents(element.j + 1)[element.j]
    return phi(half_size) * Poly3.monomial(0, 0, 2 * element.i, half_size) * (e1 ** a) * (e2 ** b)


def element_lambdas(element: BasisElement, half_size: float) -> Tuple[Poly3, Poly3, Poly3]:
    potential = element_potential(element, half_size)
    zero = Poly3.zero(half_size)
    if element.kind == "a":
        return potential, potential, zero
    return zero, zero, potential


@lru_cache(maxsize=16)
def basis_stress_coefficients(z_order: int, plane_terms: int, half_size: float) -> np.ndarray:
    """
    Stress coefficient tensors of every basis element.

    Returns:
        Read-only array of shape (n_basis, 6, P, Q, S)
    """
    elements = basis_elements(z_order, plane_terms)
    stresses = [stress_from_lambdas(*element_lambdas(e, half_size)) for e in elements]
    flat = stack_coefficients([p for components in stresses for p in components])
    templates = flat.reshape((len(elements), N_VOIGT) + flat.shape[1:])
    templates.setflags(write=False)
    logger.debug("Built Maxwell basis templates", elements=len(elements), shape=templates.shape[2:])
    return templates


@dataclass(frozen=True, eq=False)
class MaxwellPotential:
    """
    Symmetric diagonal potential with Lambda_x = Lambda_y from ``a`` and Lambda_z from ``b``.

    ``a[i, j]`` and ``b[i, j]`` multiply Phi (z/L)^(2i) times plane term j;
    coefficients carry units of Pa m^2.
    """

    half_size: float
    z_order: int
    plane_terms: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.z_order < 1 or self.plane_terms < 1:
            raise ConfigurationError(
                "z_order and plane_terms must be at least 1",
                z_order=self.z_order,
                plane_terms=self.plane_terms,
            )
        if not self.half_size > 0.0:
            raise ConfigurationError(f"half_size must be positive, got {self.half_size}")
        shape = (self.z_order, self.plane_terms)
        for name in ("a", "b"):
            values = np.array(getattr(self, name), dtype=float).reshape(shape)
            values.setflags(write=False)
            object.__setattr__(self, name, values)
        object.__setattr__(self, "half_size", float(self.half_size))

    @classmethod
    def zeros(cls, half_size: float, z_order: int, plane_terms: int) -> "MaxwellPotential":
        shape = (z_order, plane_terms)
        return cls(half_size, z_order, plane_terms, np.zeros(shape), np.zeros(shape))

    @classmethod
    def from_coefficients(
        cls, coefficients: Sequence[float], half_size: float, z_order: int, plane_terms: int
    ) -> "MaxwellPotential":
        """Build from the flat vector [a.ravel(); b.ravel()]."""
        coefficients = np.asarray(coefficients, dtype=float)
        n = z_order * plane_terms
        if coefficients.size != 2 * n:
            raise ConfigurationError(f"Expected {2 * n} coefficients, got {coefficients.size}")
        return cls(half_size, z_order, plane_terms, coefficients[:n], coefficients[n:])

    @property
    def coefficients(self) -> np.ndarray:
        return np.concatenate([self.a.ravel(), self.b.ravel()])

    @property
    def labels(self) -> List[str]:
        return [e.label for e in basis_elements(self.z_order, self.plane_terms)]

    def lambdas(self) -> Tuple[Poly3, Poly3, Poly3]:
        """The potential components (Lambda_x, Lambda_y, Lambda_z)."""
        L = self.half_size
        lx = Poly3.zero(L)
        lz = Poly3.zero(L)
        for element, c in zip(basis_elements(self.z_order, self.plane_terms), self.coefficients):
            if c == 0.0:
                continue
            if element.kind == "a":
                lx = lx + c * element_potential(element, L)
            else:
                lz = lz + c * element_potential(element, L)
        return lx, lx, lz

    def stress_polynomials(self) -> List[Poly3]:
        templates = basis_stress_coefficients(self.z_order, self.plane_terms, self.half_size)
        combined = np.tensordot(self.coefficients, templates, axes=(0, 0))
        return [Poly3(combined[k], self.half_size) for k in range(N_VOIGT)]

    def stress(self, points: np.ndarray) -> np.ndarray:
        """Stress at physical points, shape (n, 6)."""
        return np.column_stack([p(points) for p in self.stress_polynomials()])

    def __add__(self, other: "MaxwellPotential") -> "MaxwellPotential":
        return MaxwellPotential.from_coefficients(
            self.coefficients + other.coefficients, self.half_size, self.z_order, self.plane_terms
        )

    def __mul__(self, scalar: float) -> "MaxwellPotential":
        return MaxwellPotential.from_coefficients(
            float(scalar) * self.coefficients, self.half_size, self.z_order, self.plane_terms
        )

    __rmul__ = __mul__


def stress_from_potential(p: MaxwellPotential, x) -> SymTensor2:
    """Stress of a potential at a single point."""
    return SymTensor2.from_array(p.stress(np.asarray(x, dtype=float).reshape(1, 3))[0])


def build_symmetric_basis(z_order: int, plane_terms: int, half_size: float) -> List[MaxwellPotential]:
    """
    Unit potentials spanning the symmetry-reduced basis.

    Every element is even in x, y and z, symmetric under x <-> y and carries
    the boundary factor Phi.
    """
    n = 2 * z_order * plane_terms
    basis = []
    for k in range(n):
        unit = np.zeros(n)
        unit[k] = 1.0
        basis.append(MaxwellPotential.from_coefficients(unit, half_size, z_order, plane_terms))
    return basis


def divergence_polynomials(stress: Sequence[Poly3]) -> List[Poly3]:
    """Components of Div sigma."""
    return [
        stress[row[0]].derivative(0) + stress[row[1]].derivative(1) + stress[row[2]].derivative(2)
        for row in TENSOR_ROWS
    ]


@dataclass
class FieldDiagnostics:
    """Equilibrium checks of a stress field on a grid, absolute values in Pa."""

    n_grid: int
    max_stress: float
    max_divergence: float
    max_traction: float
    mean_stress: Tuple[float, ...]
    tolerance: float

    @property
    def relative_divergence(self) -> float:
        return self.max_divergence / self.max_stress if self.max_stress > 0.0 else 0.0

    @property
    def relative_traction(self) -> float:
        return self.max_traction / self.max_stress if self.max_stress > 0.0 else 0.0

    @property
    def relative_mean(self) -> float:
        peak = float(np.max(np.abs(self.mean_stress)))
        return peak / self.max_stress if self.max_stress > 0.0 else 0.0

    @property
    def passed(self) -> bool:
        return max(self.relative_divergence, self.relative_traction, self.relative_mean) < self.tolerance

    def as_dict(self):
        return {
            "n_grid": self.n_grid,
            "max_stress": self.max_stress,
            "max_divergence_times_half_size": self.max_divergence,
            "max_traction": self.max_traction,
            "mean_stress": dict(zip(VOIGT_LABELS, self.mean_stress)),
            "relative_divergence": self.relative_divergence,
            "relative_traction": self.relative_traction,
            "relative_mean": self.relative_mean,
            "passed": self.passed,
        }


def _face_points(half_size: float, n_grid: int, axis: int, sign: float) -> np.ndarray:
    line = np.linspace(-half_size, half_size, n_grid)
    u, v = np.meshgrid(line, line, indexing="ij")
    points = np.empty((u.size, 3))
    others = [a for a in range(3) if a != axis]
    points[:, axis] = sign * half_size
    points[:, others[0]] = u.ravel()
    points[:, others[1]] = v.ravel()
    return points


def field_diagnostics(p: MaxwellPotential, n_grid: int, tolerance: float = 1e-8) -> FieldDiagnostics:
    """
    Divergence, boundary traction and mean stress of a potential's stress field.

    The divergence is evaluated analytically on an n_grid^3 lattice and
    reported multiplied by L so it compares directly with stress. Tractions
    are sampled on n_grid^2 points of each face; the mean is exact.

    Raises:
        ConfigurationError: If n_grid < 4
    """
    if n_grid < 4:
        raise ConfigurationError(f"Diagnostics need n_grid >= 4, got {n_grid}")
    L = p.half_size
    stress = p.stress_polynomials()
    line = np.linspace(-L, L, n_grid)
    grid = np.stack(np.meshgrid(line, line, line, indexing="ij"), axis=-1).reshape(-1, 3)

    values = np.column_stack([s(grid) for s in stress])
    divergence = np.column_stack([d(grid) for d in divergence_polynomials(stress)])

    traction = 0.0
    for axis in range(3):
        for sign in (-1.0, 1.0):
            face = _face_points(L, n_grid, axis, sign)
            t = np.column_stack([stress[k](face) for k in TENSOR_ROWS[axis]])
            traction = max(traction, float(np.max(np.abs(t))))

    diagnostics = FieldDiagnostics(
        n_grid=n_grid,
        max_stress=float(np.max(np.abs(values))),
        max_divergence=float(np.max(np.abs(divergence))) * L,
        max_traction=traction,
        mean_stress=tuple(s.cube_mean() for s in stress),
        tolerance=tolerance,
    )
    logger.debug(
        "Maxwell field diagnostics",
        relative_divergence=diagnostics.relative_divergence,
        relative_traction=diagnostics.relative_traction,
        relative_mean=diagnostics.relative_mean,
    )
    return diagnostics
