"""Polynomial eigenstrain fields and stress profiles of long axisymmetric cylinders."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from eigenstrain.errors import ConfigurationError, DataError


def descending_polynomial(coefficients) -> Polynomial:
    """Polynomial whose i-th coefficient (1-based) multiplies r^(n - i)."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.size == 0:
        return Polynomial([0.0])
    return Polynomial(coefficients[::-1])


def descending_coefficients(poly: Polynomial, length: int) -> np.ndarray:
    """Inverse of :func:`descending_polynomial`, zero-padded to ``length``."""
    ascending = np.zeros(length)
    coef = poly.coef[:length]
    ascending[: coef.size] = coef
    return ascending[::-1].copy()


@dataclass(frozen=True, eq=False)
class AxisymPolyField:
    """
    Eigenstrain of a long cylinder with polynomial radial profiles.

    ``f[i-1]``, ``g[i-1]`` and ``h[i-1]`` multiply r^(l - i) in the rr, theta-theta
    and zz components, with r in meters. Shear components are zero.
    """

    order: int
    radius: float
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        order = int(self.order)
        errors = []
        if order < 1:
            errors.append(f"order must be at least 1, got {order}")
        if not float(self.radius) > 0.0:
            errors.append(f"radius must be positive, got {self.radius}")
        arrays = {}
        for name in ("f", "g", "h"):
            values = np.array(getattr(self, name), dtype=float).reshape(-1)
            if values.size != order:
                errors.append(f"{name} needs {order} coefficients, got {values.size}")
            values.setflags(write=False)
            arrays[name] = values
        if errors:
            raise ConfigurationError("; ".join(errors))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "radius", float(self.radius))
        for name, values in arrays.items():
            object.__setattr__(self, name, values)

    @classmethod
    def zeros(cls, order: int, radius: float) -> "AxisymPolyField":
        return cls(order, radius, np.zeros(order), np.zeros(order), np.zeros(order))

    @classmethod
    def from_normalized(cls, f_hat, g_hat, h_hat, radius: float) -> "AxisymPolyField":
        """Build from coefficients of (r/R)^(l - i), which are dimensionless strains."""
        f_hat = np.asarray(f_hat, dtype=float)
        order = f_hat.size
        powers = radius ** (order - 1 - np.arange(order, dtype=float))
        return cls(order, radius, f_hat / powers, np.asarray(g_hat, dtype=float) / powers,
                   np.asarray(h_hat, dtype=float) / powers)

    @classmethod
    def from_vector(cls, vector, order: int, radius: float) -> "AxisymPolyField":
        """Inverse of :meth:`as_vector`."""
        vector = np.asarray(vector, dtype=float)
        return cls(order, radius, vector[:order], vector[order:2 * order], vector[2 * order:])

    def as_vector(self) -> np.ndarray:
        """Coefficients stacked as [f; g; h]."""
        return np.concatenate([self.f, self.g, self.h])

    def normalized(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients of (r/R)^(l - i)."""
        powers = self.radius ** (self.order - 1 - np.arange(self.order, dtype=float))
        return self.f * powers, self.g * powers, self.h * powers

    def polynomials(self) -> Tuple[Polynomial, Polynomial, Polynomial]:
        """The rr, theta-theta and zz components as numpy polynomials in r."""
        return descending_polynomial(self.f), descending_polynomial(self.g), descending_polynomial(self.h)

    def evaluate(self, r) -> np.ndarray:
        """Component values at radii r, shape (n, 3) ordered (rr, tt, zz)."""
        r = np.asarray(r, dtype=float)
        return np.column_stack([p(r) for p in self.polynomials()])

    @property
    def axis_mismatch(self) -> float:
        """f_l - g_l, the constant part of (eps_rr - eps_tt) that would drive a 1/r term."""
        return float(self.f[-1] - self.g[-1])

    def __add__(self, other: "AxisymPolyField") -> "AxisymPolyField":
        _check_compatible(self, other)
        return AxisymPolyField(self.order, self.radius, self.f + other.f, self.g + other.g, self.h + other.h)

    def __sub__(self, other: "AxisymPolyField") -> "AxisymPolyField":
        _check_compatible(self, other)
        return AxisymPolyField(self.order, self.radius, self.f - other.f, self.g - other.g, self.h - other.h)

    def __mul__(self, scalar: float) -> "AxisymPolyField":
        s = float(scalar)
        return AxisymPolyField(self.order, self.radius, s * self.f, s * self.g, s * self.h)

    __rmul__ = __mul__

    def allclose(self, other: "AxisymPolyField", rtol: float = 1e-10, atol: float = 0.0) -> bool:
        _check_compatible(self, other)
        return bool(np.allclose(np.concatenate(self.normalized()), np.concatenate(other.normalized()),
                                rtol=rtol, atol=atol))


def _check_compatible(a: AxisymPolyField, b: AxisymPolyField):
    if a.order != b.order or a.radius != b.radius:
        raise ConfigurationError(
            "Axisymmetric fields differ in order or radius",
            left=[a.order, a.radius],
            right=[b.order, b.radius],
        )


@dataclass(frozen=True, eq=False)
class AxisymStressProfile:
    """
    Radial stress samples in Pa at radii r in meters.

    ``uncertainty`` has shape (n, 3) ordered (rr, tt, zz) when present.
    """

    r: np.ndarray
    sigma_rr: np.ndarray
    sigma_tt: np.ndarray
    sigma_zz: np.ndarray
    uncertainty: Optional[np.ndarray] = None

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(-1)
        n = r.size
        for name in ("sigma_rr", "sigma_tt", "sigma_zz"):
            values = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if values.size != n:
                raise DataError(f"{name} has {values.size} samples for {n} radii")
            object.__setattr__(self, name, values)
        if self.uncertainty is not None:
            u = np.asarray(self.uncertainty, dtype=float).reshape(n, 3)
            if np.any(u <= 0.0):
                raise DataError("Uncertainties must be positive")
            object.__setattr__(self, "uncertainty", u)
        object.__setattr__(self, "r", r)

    @property
    def n_points(self) -> int:
        return int(self.r.size)

    @property
    def stress(self) -> np.ndarray:
        """Samples stacked as shape (n, 3)."""
        return np.column_stack([self.sigma_rr, self.sigma_tt, self.sigma_zz])

    @classmethod
    def from_array(cls, r, stress, uncertainty=None) -> "AxisymStressProfile":
        stress = np.asarray(stress, dtype=float).reshape(-1, 3)
        return cls(r, stress[:, 0], stress[:, 1], stress[:, 2], uncertainty)


@dataclass(frozen=True)
class AxisymSolution:
    """
    Radial displacement U = alpha r + U_p and the uniform axial strain.

    ``up[i-1]`` multiplies r^(l + 1 - i). The 1/r homogeneous coefficient
    ``beta`` is always zero so that U stays finite on the axis.
    """

    up: np.ndarray
    alpha: float
    eps_zz_bar: float
    beta: float = 0.0

    def displacement(self) -> Polynomial:
        """U as a polynomial in r."""
        return descending_polynomial(self.up) + Polynomial([0.0, self.alpha])


@dataclass(frozen=True, eq=False)
class LatticeProfile:
    """Lattice spacings in Angstrom along rr, theta-theta and zz at radii r in meters."""

    r: np.ndarray
    spacing: np.ndarray
    uncertainty: Optional[np.ndarray] = None

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float).reshape(-1)
        spacing = np.asarray(self.spacing, dtype=float).reshape(r.size, 3)
        if np.any(spacing <= 0.0):
            raise DataError("Lattice spacings must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "spacing", spacing)
        if self.uncertainty is not None:
            object.__setattr__(self, "uncertainty", np.asarray(self.uncertainty, dtype=float).reshape(r.size, 3))

    @property
    def n_points(self) -> int:
        return int(self.r.size)


@dataclass(frozen=True, eq=False)
class D0Poly:
    """
    Unstressed lattice spacing d0(r) = sum_j c_j (r/R)^j in Angstrom.

    ``d0_ref`` is the constant reference the initial strains were computed with.
    """

    c: np.ndarray
    radius: float
    d0_ref: float

    @property
    def order(self) -> int:
        return int(np.asarray(self.c).size) - 1

    def evaluate(self, r) -> np.ndarray:
        rho = np.asarray(r, dtype=float) / self.radius
        return Polynomial(np.asarray(self.c, dtype=float))(rho)

    def is_positive(self, n_points: int) -> bool:
        """d0 > 0 on a uniform grid of [0, R]."""
        return bool(np.all(self.evaluate(np.linspace(0.0, self.radius, n_points)) > 0.0))
