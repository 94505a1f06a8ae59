"""Forward eigenstrain solves and Helmholtz decompositions on box meshes."""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog

from eigenstrain.config import settings
from eigenstrain.errors import MeshError, SolverConvergenceError
from eigenstrain.fem.assembly import assemble_load, assemble_operator, rigid_body_modes
from eigenstrain.fem.fields import Convention, GridTensorField, GridVectorField
from eigenstrain.fem.mesh import BoxMesh
from eigenstrain.tensor_core import ElasticModel, apply_stiffness, metric_matrix
from eigenstrain.utils import Timer

logger = structlog.get_logger()


class BoundaryCondition(str, Enum):
    """How the boundary enters a box-mesh solve."""

    # natural flux condition; rigid-body modes projected out
    FREE = "free"
    # U = 0 on every boundary node
    CLAMPED = "clamped"


class DecompositionMode(str, Enum):
    ZERO_FLUX = "zero_flux"
    ZERO_DISPLACEMENT = "zero_displacement"


@dataclass
class SolveInfo:
    """Convergence record of an iterative solve."""

    iterations: int = 0
    converged: bool = True
    residual_history: List[float] = field(default_factory=list)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else 0.0


def conjugate_gradient(
    matvec: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    inverse_diagonal: np.ndarray,
    rtol: float,
    maxiter: int,
    project: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Tuple[np.ndarray, SolveInfo]:
    """
    Jacobi-preconditioned conjugate gradient for symmetric semi-definite systems.

    When ``project`` is given, the right-hand side and every preconditioned
    residual are projected onto the complement of the operator's null space,
    so iterates never pick up null-space components.

    Args:
        matvec: Operator application
        b: Right-hand side
        inverse_diagonal: Reciprocal of the operator diagonal
        rtol: Relative residual tolerance on ||r|| / ||b||
        maxiter: Iteration limit
        project: Optional orthogonal projector

    Returns:
        Tuple of (solution, SolveInfo); the info records non-convergence
        instead of raising
    """
    project = project or (lambda v: v)
    b = project(b)
    x = np.zeros_like(b)
    b_norm = np.linalg.norm(b)
    info = SolveInfo()
    if b_norm == 0.0:
        return x, info

    r = b.copy()
    z = project(inverse_diagonal * r)
    p = z.copy()
    rz = r @ z
    info.residual_history.append(1.0)

    for iteration in range(1, maxiter + 1):
        Ap = matvec(p)
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / b_norm
        info.residual_history.append(float(rel))
        info.iterations = iteration
        if rel <= rtol:
            return x, info
        z = project(inverse_diagonal * r)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new

    info.converged = False
    return x, info


class BoxOperator:
    """
    Assembled symmetric operator for one metric and boundary condition.

    Immutable after construction; solves share the assembled matrix.
    """

    def __init__(self, mesh: BoxMesh, D: np.ndarray, boundary: BoundaryCondition):
        self.mesh = mesh
        self.D = np.array(D, dtype=float)
        self.boundary = BoundaryCondition(boundary)

        with Timer("Operator assembly", dofs=mesh.n_dofs):
            K = assemble_operator(mesh, self.D)

        if self.boundary is BoundaryCondition.CLAMPED:
            free_nodes = ~mesh.boundary_nodes
            self.free_dofs = np.repeat(free_nodes, 3)
            self.matrix = K[self.free_dofs][:, self.free_dofs].tocsr()
            self.modes = None
        else:
            self.free_dofs = None
            self.matrix = K
            self.modes = rigid_body_modes(mesh)

        diagonal = self.matrix.diagonal()
        self.inverse_diagonal = np.where(diagonal > 0.0, 1.0 / np.where(diagonal > 0.0, diagonal, 1.0), 0.0)

    def _project(self, v: np.ndarray) -> np.ndarray:
        return v - self.modes @ (self.modes.T @ v)

    def solve(self, load: np.ndarray) -> Tuple[np.ndarray, SolveInfo]:
        """
        Solve for the displacement dofs driven by a load vector.

        Raises:
            SolverConvergenceError: If CG stops before the tolerance
        """
        rtol = settings.CG_RTOL
        maxiter = settings.CG_MAX_ITER_FACTOR * self.mesh.n_nodes

        if self.boundary is BoundaryCondition.CLAMPED:
            if not np.any(self.free_dofs):
                return np.zeros(self.mesh.n_dofs), SolveInfo()
            x_free, info = conjugate_gradient(
                self.matrix.dot, load[self.free_dofs], self.inverse_diagonal, rtol, maxiter
            )
            x = np.zeros(self.mesh.n_dofs)
            x[self.free_dofs] = x_free
        else:
            x, info = conjugate_gradient(
                self.matrix.dot, load, self.inverse_diagonal, rtol, maxiter, project=self._project
            )

        if not info.converged:
            logger.error(
                "Conjugate gradient did not converge",
                iterations=info.iterations,
                residual=info.final_residual,
                cells=self.mesh.cells,
            )
            raise SolverConvergenceError(
                f"CG stopped after {info.iterations} iterations at relative residual {info.final_residual:.3e}",
                residual_history=info.residual_history,
            )

        logger.debug(
            "Conjugate gradient converged",
            iterations=info.iterations,
            residual=info.final_residual,
            boundary=self.boundary.value,
        )
        return x, info

    def load(self, field_values: GridTensorField) -> np.ndarray:
        return assemble_load(self.mesh, field_values.at_quadrature(), self.D)


@lru_cache(maxsize=8)
def get_operator(mesh: BoxMesh, weight: Optional[ElasticModel], boundary: BoundaryCondition) -> BoxOperator:
    """Cached operator for a mesh, a weight (None for identity) and a boundary condition."""
    return BoxOperator(mesh, metric_matrix(weight), boundary)


@dataclass(frozen=True)
class ForwardSolution:
    """Displacement, stress and elastic strain of a forward eigenstrain solve."""

    displacement: GridVectorField
    stress: GridTensorField
    elastic_strain: GridTensorField
    info: SolveInfo


@dataclass(frozen=True)
class HelmholtzSplit:
    """Potential and solenoidal parts of a strain field, with the potential's displacement."""

    potential: GridTensorField
    solenoidal: GridTensorField
    displacement: GridVectorField
    info: SolveInfo


def _check_mesh(field_values: GridTensorField, mesh: BoxMesh):
    if field_values.mesh != mesh:
        raise MeshError(
            "Field does not live on the solver mesh",
            field_cells=field_values.mesh.cells,
            mesh_cells=mesh.cells,
        )


def forward_solve(eps_star: GridTensorField, m: ElasticModel, mesh: BoxMesh) -> ForwardSolution:
    """
    Residual stress generated by an eigenstrain on a traction-free box.

    Finds U with integral (C:sym grad U):sym grad v = integral (C:eps*):sym grad v
    for all trilinear v, with rigid-body modes removed, then returns
    sigma = C:(sym grad U - eps*) at the Gauss points.

    Args:
        eps_star: Eigenstrain; nodal inputs are interpolated to Gauss points
        m: Elastic constants
        mesh: Box mesh the field lives on

    Returns:
        ForwardSolution with Gauss-point stress and elastic strain

    Raises:
        MeshError: If the field lives on another mesh
        SolverConvergenceError: If the linear solve fails
    """
    _check_mesh(eps_star, mesh)
    operator = get_operator(mesh, m, BoundaryCondition.FREE)
    dofs, info = operator.solve(operator.load(eps_star))
    displacement = GridVectorField.from_dofs(mesh, dofs)

    total = displacement.symmetric_gradient()
    elastic = total.values - eps_star.to_gauss().values
    stress = apply_stiffness(elastic, m)

    logger.info(
        "Forward eigenstrain solve finished",
        cells=mesh.cells,
        iterations=info.iterations,
        max_stress=float(np.max(np.abs(stress))) if stress.size else 0.0,
    )
    return ForwardSolution(
        displacement=displacement,
        stress=GridTensorField(mesh, stress, Convention.GAUSS),
        elastic_strain=GridTensorField(mesh, elastic, Convention.GAUSS),
        info=info,
    )


def helmholtz_decompose(
    eps: GridTensorField,
    mesh: BoxMesh,
    mode: DecompositionMode = DecompositionMode.ZERO_FLUX,
    weight: Optional[ElasticModel] = None,
) -> HelmholtzSplit:
    """
    Split a strain field into a symmetric gradient and a solenoidal remainder.

    ``zero_flux`` solves the forward problem with C replaced by the weight
    (identity by default) and natural boundary conditions; ``zero_displacement``
    imposes U = 0 on the boundary. In both modes the solenoidal part is the
    Galerkin-orthogonal remainder, so the two parts sum exactly to the input.

    Args:
        eps: Strain field
        mesh: Box mesh the field lives on
        mode: Boundary treatment of the potential
        weight: None for the L2 split, an ElasticModel for the energy-weighted split

    Returns:
        HelmholtzSplit with Gauss-point parts
    """
    _check_mesh(eps, mesh)
    mode = DecompositionMode(mode)
    boundary = BoundaryCondition.FREE if mode is DecompositionMode.ZERO_FLUX else BoundaryCondition.CLAMPED
    operator = get_operator(mesh, weight, boundary)
    dofs, info = operator.solve(operator.load(eps))
    displacement = GridVectorField.from_dofs(mesh, dofs)

    potential = displacement.symmetric_gradient()
    solenoidal = GridTensorField(mesh, eps.to_gauss().values - potential.values, Convention.GAUSS)

    logger.info(
        "Helmholtz decomposition finished",
        mode=mode.value,
        weighted=weight is not None,
        iterations=info.iterations,
    )
    return HelmholtzSplit(potential=potential, solenoidal=solenoidal, displacement=displacement, info=info)


def weak_flux_residual(sigma: GridTensorField) -> np.ndarray:
    """
    Weak boundary-flux residual of a stress field.

    Returns the load vector integral sigma : sym grad v for every nodal basis
    function; for an equilibrated field it vanishes at interior and boundary
    nodes alike.
    """
    return assemble_load(sigma.mesh, sigma.at_quadrature(), metric_matrix(None))

__all__ = [
    "BoundaryCondition",
    "BoxOperator",
    "DecompositionMode",
    "ForwardSolution",
    "HelmholtzSplit",
    "SolveInfo",
    "conjugate_gradient",
    "forward_solve",
    "get_operator",
    "helmholtz_decompose",
    "weak_flux_residual",
]
