"""Longitudinal ray transform of strain fields and stress reconstruction from its visible part."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid

from eigenstrain.constants import (
    DEFAULT_RAY_STEP_FRACTION,
    DIRECTION_TOLERANCE,
    SEGMENT_GAUSS_POINTS,
)
from eigenstrain.errors import ConfigurationError
from eigenstrain.fem.fields import Convention, GridTensorField, GridVectorField
from eigenstrain.fem.mesh import BoxMesh, build_box_mesh
from eigenstrain.fem.solver import DecompositionMode, forward_solve, helmholtz_decompose
from eigenstrain.maxwell.potential import MaxwellPotential
from eigenstrain.tensor_core import VOIGT_WEIGHTS, ElasticModel, apply_compliance, field_norm

logger = structlog.get_logger()

METHODS = ("trapezoid", "segment")


@dataclass(frozen=True, eq=False)
class Ray:
    """Line s + t xi with a unit direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = np.array(self.origin, dtype=float).reshape(3)
        direction = np.array(self.direction, dtype=float).reshape(3)
        if abs(np.linalg.norm(direction) - 1.0) > DIRECTION_TOLERANCE:
            raise ConfigurationError(f"Ray direction must be a unit vector, got {direction.tolist()}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)

    @classmethod
    def through(cls, origin, direction) -> "Ray":
        """Ray with the direction normalized."""
        direction = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise ConfigurationError("Ray direction must be nonzero")
        return cls(origin, direction / norm)

    def clip(self, half_size: Sequence[float]) -> Optional[Tuple[float, float]]:
        """
        Entry and exit parameters against the box [-L, L]^3 by the slab method.

        Returns:
            (entry, exit) with entry < exit, or None when the ray misses
        """
        entry, exit_ = -np.inf, np.inf
        for o, d, L in zip(self.origin, self.direction, half_size):
            if d == 0.0:
                if abs(o) > L:
                    return None
                continue
            t1, t2 = (-L - o) / d, (L - o) / d
            entry = max(entry, min(t1, t2))
            exit_ = min(exit_, max(t1, t2))
        if not entry < exit_:
            return None
        return float(entry), float(exit_)

    def point(self, t: np.ndarray) -> np.ndarray:
        return self.origin[None, :] + np.asarray(t, dtype=float)[:, None] * self.direction[None, :]

    @property
    def projector(self) -> np.ndarray:
        """Voigt vector p with p . eps = xi_i eps_ij xi_j."""
        x, y, z = self.direction
        return VOIGT_WEIGHTS * np.array([x * x, y * y, z * z, x * y, y * z, x * z])


def _cell_crossings(ray: Ray, mesh: BoxMesh, entry: float, exit_: float) -> np.ndarray:
    """Parameters where the ray crosses grid planes, with the endpoints, sorted."""
    crossings = [np.array([entry, exit_])]
    for axis, coords in enumerate(mesh.axes):
        d = ray.direction[axis]
        if d == 0.0:
            continue
        t = (coords - ray.origin[axis]) / d
        crossings.append(t[(t > entry) & (t < exit_)])
    return np.unique(np.concatenate(crossings))


def lrt_integral(
    eps: GridTensorField,
    ray: Ray,
    method: str = "trapezoid",
    step_fraction: float = DEFAULT_RAY_STEP_FRACTION,
) -> Tuple[float, float]:
    """
    Integral of xi . eps(s + t xi) . xi along the part of a ray inside the box.

    ``trapezoid`` marches with a step of at most ``step_fraction`` times the
    smallest cell edge. ``segment`` splits the ray at cell faces and applies
    Gauss-Legendre points per segment, exact for the piecewise trilinear
    interpolant.

    Returns:
        (value in meters, path length in meters); (0, 0) when the ray misses
    """
    if method not in METHODS:
        raise ConfigurationError(f"Unknown ray integration method '{method}'", allowed=list(METHODS))
    mesh = eps.mesh
    span = ray.clip(mesh.half_size)
    if span is None:
        return 0.0, 0.0
    entry, exit_ = span
    length = exit_ - entry
    p = ray.projector

    if method == "trapezoid":
        step = step_fraction * float(np.min(mesh.spacing))
        n = max(int(np.ceil(length / step)), 1)
        t = np.linspace(entry, exit_, n + 1)
        value = trapezoid(eps.evaluate(ray.point(t)) @ p, t)
    else:
        nodes, weights = leggauss(SEGMENT_GAUSS_POINTS)
        breaks = _cell_crossings(ray, mesh, entry, exit_)
        mid = 0.5 * (breaks[1:] + breaks[:-1])
        half = 0.5 * (breaks[1:] - breaks[:-1])
        t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        value = float(w @ (eps.evaluate(ray.point(t)) @ p))
    return float(value), float(length)


@dataclass(frozen=True)
class DetectorGeometry:
    """Square detector centered on the box, normal to the beam."""

    pixels: int
    pixel_pitch: float

    @classmethod
    def covering(cls, mesh: BoxMesh, pixels: int) -> "DetectorGeometry":
        """Detector just wide enough to see the whole box from any direction."""
        extent = 2.0 * float(np.linalg.norm(mesh.half_size))
        return cls(pixels, extent / pixels)

    @property
    def coordinates(self) -> np.ndarray:
        return (np.arange(self.pixels) + 0.5 - 0.5 * self.pixels) * self.pixel_pitch


def detector_axes(direction: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal (u, v) spanning the plane normal to the beam."""
    direction = np.asarray(direction, dtype=float)
    helper = np.eye(3)[int(np.argmin(np.abs(direction)))]
    u = np.cross(helper, direction)
    u /= np.linalg.norm(u)
    v = np.cross(direction, u)
    return u, v


@dataclass
class ProjectionImage:
    """
    One LRT projection.

    ``values`` and ``path_length`` have shape (pixels, pixels) indexed [v, u];
    pixels whose ray misses the box have zero path length and ``hit`` False.
    """

    direction: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    geometry: DetectorGeometry
    values: np.ndarray
    path_length: np.ndarray

    @property
    def hit(self) -> np.ndarray:
        return self.path_length > 0.0

    @property
    def average_strain(self) -> np.ndarray:
        """Iε / L where the ray crosses the box, NaN elsewhere."""
        average = np.full(self.values.shape, np.nan)
        np.divide(self.values, self.path_length, out=average, where=self.hit)
        return average


def simulate_projections(
    eps: GridTensorField,
    geometry: DetectorGeometry,
    directions: Sequence[Sequence[float]],
    method: str = "trapezoid",
    step_fraction: float = DEFAULT_RAY_STEP_FRACTION,
) -> List[ProjectionImage]:
    """
    Simulate LRT projection images of a strain field.

    Raises:
        ConfigurationError: If no directions are given
    """
    if len(directions) == 0:
        raise ConfigurationError("At least one projection direction is required")
    images = []
    coords = geometry.coordinates
    for raw in directions:
        direction = np.asarray(raw, dtype=float)
        direction = direction / np.linalg.norm(direction)
        u_axis, v_axis = detector_axes(direction)
        values = np.zeros((geometry.pixels, geometry.pixels))
        lengths = np.zeros_like(values)
        for iv, v in enumerate(coords):
            for iu, u in enumerate(coords):
                ray = Ray(u * u_axis + v * v_axis, direction)
                values[iv, iu], lengths[iv, iu] = lrt_integral(eps, ray, method, step_fraction)
        images.append(ProjectionImage(direction, u_axis, v_axis, geometry, values, lengths))
        logger.debug("Simulated projection", direction=direction.tolist(), hits=int(np.count_nonzero(lengths)))
    logger.info("LRT projections simulated", images=len(images), pixels=geometry.pixels, method=method)
    return images


def reconstruct_stress_from_strain(eps_elastic: GridTensorField, m: ElasticModel, mesh: BoxMesh) -> GridTensorField:
    """
    Stress recovered from the LRT-visible part of an elastic strain field.

    The solenoidal part under the zero-displacement split is what ray
    measurements determine; using it, negated, as an eigenstrain in the
    forward problem reproduces the stress.
    """
    split = helmholtz_decompose(eps_elastic, mesh, DecompositionMode.ZERO_DISPLACEMENT)
    return forward_solve(-split.solenoidal, m, mesh).stress


def boundary_vanishing_displacement(mesh: BoxMesh, amplitude: float, rng: np.random.Generator) -> GridVectorField:
    """
    Random smooth displacement vanishing on the box surface.

    U = amplitude L b(x) (a + B x / L) with the bubble
    b = prod_k (x_k^2 - L_k^2) / L_k^2 and random a, B.
    """
    L = np.asarray(mesh.half_size)
    scale = float(np.max(L))
    a = rng.standard_normal(3)
    B = rng.standard_normal((3, 3))

    def displacement(points: np.ndarray) -> np.ndarray:
        bubble = np.prod((points ** 2 - L ** 2) / L ** 2, axis=1)
        return amplitude * scale * bubble[:, None] * (a[None, :] + (points / L) @ B.T)

    return GridVectorField.from_function(mesh, displacement)


def random_rays(mesh: BoxMesh, count: int, rng: np.random.Generator) -> List[Ray]:
    """Rays through uniformly drawn interior points with isotropic directions."""
    L = np.asarray(mesh.half_size)
    origins = rng.uniform(-L, L, size=(count, 3))
    directions = rng.standard_normal((count, 3))
    return [Ray.through(o, d) for o, d in zip(origins, directions)]


@dataclass
class LinkCheckRow:
    """Reconstruction quality at one mesh resolution."""

    cells: int
    reconstruction_error: float
    contamination_change: float
    lrt_null_residual: float
    potential_norm: float


@dataclass
class LinkCheckReport:
    rows: List[LinkCheckRow] = field(default_factory=list)

    @property
    def error_decreasing(self) -> bool:
        errors = [row.reconstruction_error for row in self.rows]
        return all(b < a for a, b in zip(errors, errors[1:]))


def run_link_check(
    potential: MaxwellPotential,
    m: ElasticModel,
    resolutions: Sequence[int],
    contamination: float = 1.0e-3,
    n_rays: int = 64,
    seed: int = 0,
) -> LinkCheckReport:
    """
    Reconstruct a Maxwell stress field from its elastic strain at several resolutions.

    At every resolution the strain S:sigma is sampled at Gauss points, a
    boundary-vanishing discrete potential is added, and both versions are
    reconstructed. The report lists the error against the analytic stress,
    the change caused by the contamination and the largest ray integral of
    the contamination over random rays, relative to contamination times 2L.
    """
    report = LinkCheckReport()
    L = potential.half_size
    for cells in resolutions:
        rng = np.random.default_rng(seed)
        mesh = build_box_mesh(L, cells)
        sigma = GridTensorField.from_function(mesh, potential.stress, Convention.GAUSS)
        strain = sigma.map_values(lambda values: apply_compliance(values, m))
        added = boundary_vanishing_displacement(mesh, contamination, rng).symmetric_gradient()

        clean = reconstruct_stress_from_strain(strain, m, mesh)
        dirty = reconstruct_stress_from_strain(strain + added, m, mesh)

        sigma_norm = field_norm(sigma)
        error = field_norm(clean - sigma) / sigma_norm if sigma_norm > 0.0 else field_norm(clean)
        clean_norm = field_norm(clean)
        change = field_norm(dirty - clean) / clean_norm if clean_norm > 0.0 else field_norm(dirty)

        null = max(
            (abs(lrt_integral(added, ray, method="segment")[0]) for ray in random_rays(mesh, n_rays, rng)),
            default=0.0,
        )
        row = LinkCheckRow(
            cells=cells,
            reconstruction_error=error,
            contamination_change=change,
            lrt_null_residual=null / (contamination * 2.0 * L) if contamination > 0.0 else null,
            potential_norm=field_norm(added),
        )
        report.rows.append(row)
        logger.info(
            "Link check resolution finished",
            cells=cells,
            reconstruction_error=error,
            contamination_change=change,
            lrt_null_residual=row.lrt_null_residual,
        )
    return report
