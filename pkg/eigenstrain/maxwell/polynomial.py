"""Dense trivariate polynomials in coordinates normalized by the cube half size."""

from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import convolve


def _pad_to(coef: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    padded = np.zeros(shape)
    padded[tuple(slice(0, n) for n in coef.shape)] = coef
    return padded


class Poly3:
    """
    Polynomial sum C[p, q, s] (x/L)^p (y/L)^q (z/L)^s.

    Differentiation is exact (coefficient index shifts scaled by 1/L), so
    derivatives are with respect to physical coordinates.
    """

    __slots__ = ("coef", "half_size")

    def __init__(self, coef, half_size: float = 1.0):
        coef = np.array(coef, dtype=float)
        if coef.ndim != 3:
            raise ValueError(f"Poly3 coefficients need three axes, got shape {coef.shape}")
        self.coef = coef
        self.half_size = float(half_size)

    @classmethod
    def zero(cls, half_size: float = 1.0) -> "Poly3":
        return cls(np.zeros((1, 1, 1)), half_size)

    @classmethod
    def monomial(cls, p: int, q: int, s: int, half_size: float = 1.0, value: float = 1.0) -> "Poly3":
        coef = np.zeros((p + 1, q + 1, s + 1))
        coef[p, q, s] = value
        return cls(coef, half_size)

    @classmethod
    def separable(cls, cx, cy, cz, half_size: float = 1.0) -> "Poly3":
        """Product of three univariate polynomials given by ascending coefficients."""
        return cls(np.einsum("p,q,s->pqs", np.asarray(cx, float), np.asarray(cy, float), np.asarray(cz, float)),
                   half_size)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float)) / self.half_size
        return P.polyval3d(points[:, 0], points[:, 1], points[:, 2], self.coef)

    def derivative(self, axis: int, count: int = 1) -> "Poly3":
        if self.coef.shape[axis] <= count:
            return Poly3.zero(self.half_size)
        return Poly3(P.polyder(self.coef, m=count, scl=1.0 / self.half_size, axis=axis), self.half_size)

    def d(self, *axes: int) -> "Poly3":
        """Mixed partial derivative, e.g. ``poly.d(0, 1)`` for d2/dx dy."""
        result = self
        for axis in axes:
            result = result.derivative(axis)
        return result

    def swap_xy(self) -> "Poly3":
        return Poly3(np.transpose(self.coef, (1, 0, 2)), self.half_size)

    def cube_mean(self) -> float:
        """Exact mean over [-L, L]^3."""
        means = []
        for n in self.coef.shape:
            k = np.arange(n)
            means.append(np.where(k % 2 == 0, 1.0 / (k + 1.0), 0.0))
        return float(np.einsum("pqs,p,q,s->", self.coef, *means))

    def _coerce(self, other: "Poly3"):
        shape = tuple(max(a, b) for a, b in zip(self.coef.shape, other.coef.shape))
        return _pad_to(self.coef, shape), _pad_to(other.coef, shape)

    def __add__(self, other: "Poly3") -> "Poly3":
        a, b = self._coerce(other)
        return Poly3(a + b, self.half_size)

    def __sub__(self, other: "Poly3") -> "Poly3":
        a, b = self._coerce(other)
        return Poly3(a - b, self.half_size)

    def __neg__(self) -> "Poly3":
        return Poly3(-self.coef, self.half_size)

    def __mul__(self, other) -> "Poly3":
        if isinstance(other, Poly3):
            return Poly3(convolve(self.coef, other.coef, method="direct"), self.half_size)
        return Poly3(float(other) * self.coef, self.half_size)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly3":
        result = Poly3(np.ones((1, 1, 1)), self.half_size)
        for _ in range(int(exponent)):
            result = result * self
        return result

    def __repr__(self):
        return f"Poly3(shape={self.coef.shape}, half_size={self.half_size})"


def stack_coefficients(polys: Sequence[Poly3]) -> np.ndarray:
    """Coefficients of several polynomials padded to a common shape, stacked on axis 0."""
    shape = tuple(max(p.coef.shape[axis] for p in polys) for axis in range(3))
    return np.stack([_pad_to(p.coef, shape) for p in polys])
