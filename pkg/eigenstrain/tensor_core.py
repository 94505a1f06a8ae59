"""Symmetric rank-2 tensors, isotropic Hooke's law and field inner products."""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np

from eigenstrain.constants import GPA, N_VOIGT, VOIGT_LABELS, VOIGT_PAIRS
from eigenstrain.errors import ConfigurationError, MeshError, SingularModelError
from eigenstrain.fem.element import QuadratureRule
from eigenstrain.fem.fields import GridTensorField

# Contraction weights: off-diagonal components appear twice in a:b.
VOIGT_WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric rank-2 tensor stored as (xx, yy, zz, xy, yz, xz), tensor shear."""

    xx: float = 0.0
    yy: float = 0.0
    zz: float = 0.0
    xy: float = 0.0
    yz: float = 0.0
    xz: float = 0.0

    @classmethod
    def from_array(cls, values) -> "SymTensor2":
        values = np.asarray(values, dtype=float).reshape(N_VOIGT)
        return cls(*(float(v) for v in values))

    @classmethod
    def from_matrix(cls, matrix) -> "SymTensor2":
        """Symmetric part of a 3x3 matrix."""
        matrix = np.asarray(matrix, dtype=float)
        return cls.from_array(from_matrix(0.5 * (matrix + matrix.T)))

    @classmethod
    def identity(cls, scale: float = 1.0) -> "SymTensor2":
        return cls(scale, scale, scale, 0.0, 0.0, 0.0)

    def to_array(self) -> np.ndarray:
        return np.array([self.xx, self.yy, self.zz, self.xy, self.yz, self.xz])

    def to_matrix(self) -> np.ndarray:
        return to_matrix(self.to_array())

    @property
    def trace(self) -> float:
        return self.xx + self.yy + self.zz

    def __add__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "SymTensor2") -> "SymTensor2":
        return SymTensor2.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> "SymTensor2":
        return SymTensor2.from_array(-self.to_array())

    def __mul__(self, scalar: float) -> "SymTensor2":
        return SymTensor2.from_array(float(scalar) * self.to_array())

    __rmul__ = __mul__

    def as_dict(self):
        return dict(zip(VOIGT_LABELS, self.to_array().tolist()))


@dataclass(frozen=True)
class ElasticModel:
    """
    Isotropic linear elastic constants.

    Args:
        youngs_modulus: Young's modulus E in Pa
        poisson_ratio: Poisson's ratio, strictly between -1 and 0.5
    """

    youngs_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        E, nu = float(self.youngs_modulus), float(self.poisson_ratio)
        if nu == 0.5 or nu == -1.0:
            raise SingularModelError(
                f"Poisson's ratio {nu} makes the isotropic stiffness singular",
                poisson_ratio=nu,
            )
        errors = []
        if not np.isfinite(E) or E <= 0.0:
            errors.append(f"Young's modulus must be positive, got {E}")
        if not -1.0 < nu < 0.5:
            errors.append(f"Poisson's ratio must lie in (-1, 0.5), got {nu}")
        if errors:
            raise ConfigurationError("; ".join(errors), youngs_modulus=E, poisson_ratio=nu)
        object.__setattr__(self, "youngs_modulus", E)
        object.__setattr__(self, "poisson_ratio", nu)

    @classmethod
    def from_gpa(cls, youngs_modulus_gpa: float, poisson_ratio: float) -> "ElasticModel":
        return cls(youngs_modulus_gpa * GPA, poisson_ratio)

    @property
    def lame_lambda(self) -> float:
        E, nu = self.youngs_modulus, self.poisson_ratio
        return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    @property
    def bulk_modulus(self) -> float:
        return self.youngs_modulus / (3.0 * (1.0 - 2.0 * self.poisson_ratio))

    @cached_property
    def stiffness_matrix(self) -> np.ndarray:
        """6x6 matrix taking tensor-shear Voigt strain to Voigt stress."""
        lam, mu = self.lame_lambda, self.shear_modulus
        C = np.zeros((N_VOIGT, N_VOIGT))
        C[:3, :3] = lam
        C[np.arange(N_VOIGT), np.arange(N_VOIGT)] += 2.0 * mu
        return C

    @cached_property
    def compliance_matrix(self) -> np.ndarray:
        """6x6 matrix taking Voigt stress to tensor-shear Voigt strain."""
        E, nu = self.youngs_modulus, self.poisson_ratio
        S = np.zeros((N_VOIGT, N_VOIGT))
        S[:3, :3] = -nu / E
        S[np.arange(3), np.arange(3)] = 1.0 / E
        S[np.arange(3, N_VOIGT), np.arange(3, N_VOIGT)] = (1.0 + nu) / E
        return S


TensorLike = Union[SymTensor2, np.ndarray]


def to_matrix(values: np.ndarray) -> np.ndarray:
    """Expand Voigt arrays of shape (..., 6) to symmetric matrices (..., 3, 3)."""
    values = np.asarray(values, dtype=float)
    matrix = np.empty(values.shape[:-1] + (3, 3))
    for k, (i, j) in enumerate(VOIGT_PAIRS):
        matrix[..., i, j] = values[..., k]
        matrix[..., j, i] = values[..., k]
    return matrix


def from_matrix(matrix: np.ndarray) -> np.ndarray:
    """Collapse matrices (..., 3, 3) to Voigt arrays (..., 6), reading the upper triangle."""
    matrix = np.asarray(matrix, dtype=float)
    return np.stack([matrix[..., i, j] for i, j in VOIGT_PAIRS], axis=-1)


def trace(values: TensorLike):
    if isinstance(values, SymTensor2):
        return values.trace
    values = np.asarray(values)
    return values[..., 0] + values[..., 1] + values[..., 2]


def contract(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Double contraction a:b over the last (Voigt) axis."""
    return np.sum(np.asarray(a) * np.asarray(b) * VOIGT_WEIGHTS, axis=-1)


def apply_stiffness(e: TensorLike, m: ElasticModel) -> TensorLike:
    """
    Stress from strain by isotropic Hooke's law.

    ``sigma = E/(1+nu) * (nu/(1-2nu) * tr(eps) * I + eps)``

    Args:
        e: Strain as a SymTensor2 or a Voigt array of shape (..., 6)
        m: Elastic constants

    Returns:
        Stress of the same kind as the input
    """
    if isinstance(e, SymTensor2):
        return SymTensor2.from_array(apply_stiffness(e.to_array(), m))
    e = np.asarray(e, dtype=float)
    sigma = 2.0 * m.shear_modulus * e
    sigma[..., :3] += (m.lame_lambda * trace(e))[..., None]
    return sigma


def apply_compliance(s: TensorLike, m: ElasticModel) -> TensorLike:
    """
    Strain from stress, the inverse of :func:`apply_stiffness`.

    ``eps = (1+nu)/E * sigma - nu/E * tr(sigma) * I``
    """
    if isinstance(s, SymTensor2):
        return SymTensor2.from_array(apply_compliance(s.to_array(), m))
    s = np.asarray(s, dtype=float)
    E, nu = m.youngs_modulus, m.poisson_ratio
    eps = (1.0 + nu) / E * s
    eps[..., :3] -= (nu / E * trace(s))[..., None]
    return eps


def metric_matrix(weight: Optional[ElasticModel] = None) -> np.ndarray:
    """
    Matrix D with a:W:b = a_v^T D b_v for tensor-shear Voigt vectors.

    ``weight=None`` is the identity (plain L2 contraction); an ElasticModel
    gives the stiffness-weighted contraction (C:a):b.
    """
    W = np.diag(VOIGT_WEIGHTS)
    if weight is None:
        return W
    return W @ weight.stiffness_matrix


def inner_product(
    a: GridTensorField,
    b: GridTensorField,
    weight: Optional[ElasticModel] = None,
    quad: Optional[QuadratureRule] = None,
) -> float:
    """
    Integral of a:b (identity weight) or (C:a):b (stiffness weight) over the mesh.

    Args:
        a: First field
        b: Second field, on the same mesh
        weight: None for the L2 product, an ElasticModel for the energy product
        quad: Per-cell quadrature rule, 2x2x2 Gauss by default

    Returns:
        The inner product

    Raises:
        MeshError: If the fields live on different meshes
    """
    if a.mesh != b.mesh:
        raise MeshError("Inner product of fields on different meshes", left=a.mesh.cells, right=b.mesh.cells)
    quad = quad or QuadratureRule()
    _, weights = a.mesh.rule_data(quad)
    va = a.at_quadrature(quad)
    vb = b.at_quadrature(quad)
    D = metric_matrix(weight)
    pointwise = np.einsum("cqi,ij,cqj->cq", va, D, vb)
    return float(np.sum(pointwise @ weights))


def field_norm(a: GridTensorField, weight: Optional[ElasticModel] = None, quad: Optional[QuadratureRule] = None) -> float:
    """Norm induced by :func:`inner_product`."""
    return float(np.sqrt(max(inner_product(a, a, weight, quad), 0.0)))


def mean_stress(s: GridTensorField, quad: Optional[QuadratureRule] = None) -> SymTensor2:
    """
    Volume average of a tensor field.

    Raises:
        MeshError: If the mesh has no volume
    """
    quad = quad or QuadratureRule()
    volume = s.mesh.volume
    if volume <= 0.0 or s.mesh.n_cells == 0:
        raise MeshError("Mean of a field on an empty mesh")
    _, weights = s.mesh.rule_data(quad)
    values = s.at_quadrature(quad)
    total = np.einsum("cqk,q->k", values, weights)
    return SymTensor2.from_array(total / volume)
