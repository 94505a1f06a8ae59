"""Saint-Venant incompatibility of strain fields by central differences."""

import numpy as np
import structlog

from eigenstrain.constants import MIN_INCOMPATIBILITY_CELLS, N_VOIGT
from eigenstrain.errors import MeshError
from eigenstrain.fem.fields import Convention, GridTensorField
from eigenstrain.fem.mesh import BoxMesh

logger = structlog.get_logger()

XX, YY, ZZ, XY, YZ, XZ = range(N_VOIGT)


def _second_derivatives(grid: np.ndarray, h: np.ndarray):
    """
    Central second differences at interior nodes.

    ``grid`` is indexed (k, j, i, component) with x fastest. Returns a dict
    keyed by axis pairs, each of shape (nz - 1, ny - 1, nx - 1, 6).
    """
    hx, hy, hz = h
    c = grid[1:-1, 1:-1, 1:-1]

    def shifted(di=0, dj=0, dk=0):
        nk, nj, ni = grid.shape[:3]
        return grid[1 + dk:nk - 1 + dk, 1 + dj:nj - 1 + dj, 1 + di:ni - 1 + di]

    d = {
        "xx": (shifted(di=1) - 2.0 * c + shifted(di=-1)) / hx ** 2,
        "yy": (shifted(dj=1) - 2.0 * c + shifted(dj=-1)) / hy ** 2,
        "zz": (shifted(dk=1) - 2.0 * c + shifted(dk=-1)) / hz ** 2,
        "xy": (
            shifted(di=1, dj=1) - shifted(di=1, dj=-1) - shifted(di=-1, dj=1) + shifted(di=-1, dj=-1)
        ) / (4.0 * hx * hy),
        "yz": (
            shifted(dj=1, dk=1) - shifted(dj=1, dk=-1) - shifted(dj=-1, dk=1) + shifted(dj=-1, dk=-1)
        ) / (4.0 * hy * hz),
        "xz": (
            shifted(di=1, dk=1) - shifted(di=1, dk=-1) - shifted(di=-1, dk=1) + shifted(di=-1, dk=-1)
        ) / (4.0 * hx * hz),
    }
    return d


def incompatibility(eps: GridTensorField, mesh: BoxMesh) -> GridTensorField:
    """
    Evaluate the incompatibility tensor curl(curl(eps))^T at interior nodes.

    Components follow eta_ij = e_ikl e_jmn d_k d_m eps_ln, e.g.
    ``eta_xx = d_yy eps_zz + d_zz eps_yy - 2 d_yz eps_yz``. Gauss-point inputs
    are first recovered at the nodes. Second differences use the two
    neighbouring nodes along one axis or the four diagonal neighbours in a
    coordinate plane, so boundary nodes carry NaN.

    Args:
        eps: Strain field
        mesh: Box mesh the field lives on

    Returns:
        Nodal incompatibility field

    Raises:
        MeshError: If the field lives on another mesh or any axis has fewer than
            four cells
    """
    if eps.mesh != mesh:
        raise MeshError("Field does not live on the given mesh", field_cells=eps.mesh.cells, mesh_cells=mesh.cells)
    if min(mesh.cells) < MIN_INCOMPATIBILITY_CELLS:
        raise MeshError(
            f"Incompatibility stencils need at least {MIN_INCOMPATIBILITY_CELLS} cells per axis",
            cells=mesh.cells,
        )

    nx, ny, nz = mesh.node_dims
    grid = eps.to_nodal().values.reshape(nz, ny, nx, N_VOIGT)
    d = _second_derivatives(grid, mesh.spacing)

    eta = np.empty(d["xx"].shape)
    eta[..., XX] = d["yy"][..., ZZ] + d["zz"][..., YY] - 2.0 * d["yz"][..., YZ]
    eta[..., YY] = d["zz"][..., XX] + d["xx"][..., ZZ] - 2.0 * d["xz"][..., XZ]
    eta[..., ZZ] = d["xx"][..., YY] + d["yy"][..., XX] - 2.0 * d["xy"][..., XY]
    eta[..., XY] = d["yz"][..., XZ] + d["xz"][..., YZ] - d["xy"][..., ZZ] - d["zz"][..., XY]
    eta[..., YZ] = d["xz"][..., XY] + d["xy"][..., XZ] - d["yz"][..., XX] - d["xx"][..., YZ]
    eta[..., XZ] = d["xy"][..., YZ] + d["yz"][..., XY] - d["xz"][..., YY] - d["yy"][..., XZ]

    full = np.full((nz, ny, nx, N_VOIGT), np.nan)
    full[1:-1, 1:-1, 1:-1] = eta

    logger.debug("Evaluated incompatibility", cells=mesh.cells, max_abs=float(np.max(np.abs(eta))))
    return GridTensorField(mesh, full.reshape(-1, N_VOIGT), Convention.NODAL)
