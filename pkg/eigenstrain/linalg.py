"""Truncated-SVD least squares shared by the polynomial and Maxwell fits."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import structlog

from eigenstrain.config import settings
from eigenstrain.constants import CONDITION_WARNING_THRESHOLD
from eigenstrain.errors import DegenerateDesignError

logger = structlog.get_logger()

COLUMN_FLOOR = 1e-12


class DecomposedMatrix:
    """
    Matrix in thin SVD form ``A == (u * s) @ vt`` with small singular values dropped.

    Singular values at or below ``rcond`` times the largest are discarded, so
    :meth:`lstsq` returns the minimum-norm least-squares solution of the
    truncated problem.
    """

    @classmethod
    def from_matrix(cls, a: np.ndarray, rcond: Optional[float] = None) -> "DecomposedMatrix":
        a = np.asarray(a, dtype=float)
        u, s, vt = np.linalg.svd(a, full_matrices=False)
        rcond = settings.SVD_RCOND if rcond is None else rcond
        keep = s > rcond * s[0] if s.size and s[0] > 0.0 else np.zeros(s.shape, dtype=bool)
        return cls(u[:, keep], s[keep], vt[keep], s)

    def __init__(self, u, s, vt, singular_values):
        self.u = np.asarray(u)
        self.s = np.asarray(s)
        self.vt = np.asarray(vt)
        self.singular_values = np.asarray(singular_values)

    @property
    def rank(self) -> int:
        return int(self.s.size)

    @property
    def condition_number(self) -> float:
        """Ratio of the largest to the smallest singular value before truncation."""
        sv = self.singular_values
        if sv.size == 0 or sv[-1] == 0.0:
            return float("inf")
        return float(sv[0] / sv[-1])

    def lstsq(self, x: np.ndarray) -> np.ndarray:
        """Return ``y`` minimizing ``norm(A @ y - x)`` with minimum norm."""
        r = self.u.T @ x
        r = r / (self.s[:, None] if r.ndim > 1 else self.s)
        return self.vt.T @ r

    def pseudo_inverse_gram(self) -> np.ndarray:
        """``pinv(A^T A)`` restricted to the retained singular subspace."""
        return (self.vt.T / self.s ** 2) @ self.vt

    def __matmul__(self, x):
        r = self.vt @ x
        r = (self.s[:, None] if r.ndim > 1 else self.s) * r
        return self.u @ r


def column_scale(design: np.ndarray) -> np.ndarray:
    """
    Column norms used to equilibrate a design matrix.

    Columns at roundoff level relative to the largest keep their tiny norm, so
    they fall below the singular-value cutoff instead of being amplified.
    """
    norms = np.linalg.norm(design, axis=0)
    largest = norms.max() if norms.size else 0.0
    if largest == 0.0:
        return np.ones(norms.shape)
    return np.where(norms > COLUMN_FLOOR * largest, norms, largest)


@dataclass
class LeastSquaresResult:
    """Solution and diagnostics of a linear least-squares fit."""

    solution: np.ndarray
    residual: np.ndarray
    rank: int
    n_parameters: int
    condition_number: float
    singular_values: np.ndarray
    covariance: np.ndarray

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.n_parameters

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))

    @property
    def degrees_of_freedom(self) -> int:
        return max(self.residual.size - self.rank, 0)

    def standard_errors(self, scale_by_residual: bool) -> np.ndarray:
        """
        Parameter standard errors from the covariance.

        Args:
            scale_by_residual: Multiply by the reduced chi-square; use when rows
                were not weighted by known uncertainties
        """
        covariance = self.covariance
        if scale_by_residual:
            dof = self.degrees_of_freedom
            factor = (self.residual_norm ** 2 / dof) if dof > 0 else 0.0
            covariance = covariance * factor
        return np.sqrt(np.clip(np.diag(covariance), 0.0, None))


def svd_solve(
    design: np.ndarray,
    target: np.ndarray,
    rcond: Optional[float] = None,
    scale_columns: bool = False,
) -> LeastSquaresResult:
    """
    Solve ``design @ x ~ target`` by truncated SVD.

    Args:
        design: Matrix of shape (n_rows, n_parameters)
        target: Right-hand side of length n_rows
        rcond: Relative singular-value cutoff, the configured default if None
        scale_columns: Normalize columns before the decomposition; use when
            parameters have very different magnitudes

    Returns:
        LeastSquaresResult with the covariance (design^T design)^+

    Raises:
        DegenerateDesignError: If the design matrix is empty or all zero
    """
    design = np.asarray(design, dtype=float)
    target = np.asarray(target, dtype=float)
    if design.size == 0 or not np.any(design):
        raise DegenerateDesignError("Design matrix is empty or identically zero", shape=list(design.shape))

    scale = column_scale(design) if scale_columns else np.ones(design.shape[1])

    decomposed = DecomposedMatrix.from_matrix(design / scale, rcond)
    solution = decomposed.lstsq(target) / scale
    residual = design @ solution - target
    covariance = decomposed.pseudo_inverse_gram() / np.outer(scale, scale)

    result = LeastSquaresResult(
        solution=solution,
        residual=residual,
        rank=decomposed.rank,
        n_parameters=design.shape[1],
        condition_number=decomposed.condition_number,
        singular_values=decomposed.singular_values,
        covariance=covariance,
    )
    if result.rank_deficient or result.condition_number > CONDITION_WARNING_THRESHOLD:
        logger.warning(
            "Ill-conditioned least-squares problem",
            rank=result.rank,
            parameters=result.n_parameters,
            condition_number=result.condition_number,
        )
    return result
