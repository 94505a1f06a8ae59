"""Global operator and load assembly on structured box meshes."""

from typing import Optional

import numpy as np
import structlog
from scipy import sparse

from eigenstrain.config import settings
from eigenstrain.constants import N_RIGID_MODES
from eigenstrain.fem.element import DOFS_PER_CELL, QuadratureRule
from eigenstrain.fem.mesh import BoxMesh

logger = structlog.get_logger()


def element_matrix(mesh: BoxMesh, D: np.ndarray, rule: Optional[QuadratureRule] = None) -> np.ndarray:
    """
    Element matrix of the bilinear form a(u, v) = integral of (D eps(u)) . eps(v).

    Every cell of a regular grid has the same matrix.

    Returns:
        Array of shape (24, 24)
    """
    B, weights = mesh.rule_data(rule)
    return np.einsum("q,qia,ij,qjb->ab", weights, B, D, B)


def assemble_operator(mesh: BoxMesh, D: np.ndarray, rule: Optional[QuadratureRule] = None) -> sparse.csr_matrix:
    """
    Assemble the global symmetric operator in CSR form.

    Cells are processed in fixed-size chunks and the partial matrices summed in
    chunk order, so the result does not depend on the chunk size beyond
    floating-point summation order.

    Args:
        mesh: Box mesh
        D: 6x6 Voigt metric (identity-like or stiffness-weighted)
        rule: Quadrature rule

    Returns:
        Sparse matrix of shape (n_dofs, n_dofs)
    """
    Ke = element_matrix(mesh, D, rule)
    dof_map = mesh.dof_map
    chunk = max(int(settings.ASSEMBLY_CHUNK_CELLS), 1)
    n = mesh.n_dofs

    K = sparse.csr_matrix((n, n))
    for start in range(0, mesh.n_cells, chunk):
        dofs = dof_map[start:start + chunk]
        rows = np.repeat(dofs, DOFS_PER_CELL, axis=1).ravel()
        cols = np.tile(dofs, (1, DOFS_PER_CELL)).ravel()
        data = np.tile(Ke.ravel(), len(dofs))
        K = K + sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()

    logger.debug("Assembled operator", dofs=n, nonzeros=K.nnz)
    return K


def assemble_load(
    mesh: BoxMesh,
    tensor_at_quadrature: np.ndarray,
    D: np.ndarray,
    rule: Optional[QuadratureRule] = None,
) -> np.ndarray:
    """
    Assemble the load vector f_v = integral of (D t) . eps(v) for a tensor field t.

    Args:
        mesh: Box mesh
        tensor_at_quadrature: Field values, shape (n_cells, n_points, 6)
        D: 6x6 Voigt metric
        rule: Quadrature rule used to sample the field

    Returns:
        Load vector of length n_dofs
    """
    B, weights = mesh.rule_data(rule)
    weighted = np.einsum("ij,cqj->cqi", D, tensor_at_quadrature)
    local = np.einsum("q,qia,cqi->ca", weights, B, weighted)
    return np.bincount(mesh.dof_map.ravel(), weights=local.ravel(), minlength=mesh.n_dofs)


def rigid_body_modes(mesh: BoxMesh) -> np.ndarray:
    """
    Orthonormal basis of the six rigid-body displacement modes.

    Returns:
        Array of shape (n_dofs, 6)
    """
    x, y, z = mesh.nodes.T
    zero = np.zeros_like(x)
    one = np.ones_like(x)
    modes = [
        (one, zero, zero),
        (zero, one, zero),
        (zero, zero, one),
        (-y, x, zero),
        (zero, -z, y),
        (z, zero, -x),
    ]
    R = np.column_stack([np.column_stack(m).ravel() for m in modes])
    Q, _ = np.linalg.qr(R)
    return Q[:, :N_RIGID_MODES]


def null_mode_count(K: sparse.spmatrix, rtol: float = 1e-10) -> int:
    """
    Count near-zero eigenvalues of a small symmetric operator.

    Dense eigenvalue computation, intended for meshes with a few hundred
    degrees of freedom.
    """
    eigenvalues = np.linalg.eigvalsh(K.toarray())
    scale = np.max(np.abs(eigenvalues))
    return int(np.sum(np.abs(eigenvalues) <= rtol * scale))
