"""
Synthetic measurement fixtures.

Experimental profiles are not distributed with the toolkit, so tests and the
quickstart script generate noise-seeded data from known eigenstrains and
potentials instead. Run ``python -m eigenstrain.cli_io.fixtures DIR`` to write
a cylinder profile, a lattice-spacing profile and a cube grid into DIR.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import structlog

from eigenstrain.artifacts import FileArtifactStore
from eigenstrain.axisym.field import AxisymPolyField, AxisymStressProfile, D0Poly, LatticeProfile
from eigenstrain.axisym.forward import elastic_strain, forward_stress
from eigenstrain.cli_io.csv_io import grid_csv, lattice_csv, profile_csv
from eigenstrain.constants import MM, MPA
from eigenstrain.maxwell.fitting import StressSampleSet
from eigenstrain.maxwell.potential import MaxwellPotential, field_diagnostics
from eigenstrain.presets import get_preset
from eigenstrain.tensor_core import ElasticModel

logger = structlog.get_logger()


def sample_radii(radius: float, n_points: int, span_diameter: bool = True) -> np.ndarray:
    """Evenly spaced radii over [-R, R] or [0, R]."""
    start = -radius if span_diameter else 0.0
    return np.linspace(start, radius, n_points)


def synthetic_profile(
    e: AxisymPolyField,
    m: ElasticModel,
    r: np.ndarray,
    noise: float = 0.0,
    uncertainty: Optional[float] = None,
    seed: int = 0,
) -> AxisymStressProfile:
    """
    Closed-form stresses at signed radii with optional Gaussian noise.

    Args:
        e: Eigenstrain
        m: Elastic constants
        r: Radii in meters; negative values stand for the far side of a diameter
        noise: Standard deviation of the added noise in Pa
        uncertainty: Uncertainty in Pa recorded with every value
        seed: Random seed of the noise
    """
    r = np.asarray(r, dtype=float)
    stress = forward_stress(e, m, np.abs(r)).stress
    if noise > 0.0:
        stress = stress + np.random.default_rng(seed).normal(0.0, noise, stress.shape)
    sigma_u = None if uncertainty is None else np.full(stress.shape, uncertainty)
    return AxisymStressProfile.from_array(r, stress, sigma_u)


def synthetic_lattice(
    e: AxisymPolyField,
    m: ElasticModel,
    d0: D0Poly,
    r: np.ndarray,
    noise: float = 0.0,
    uncertainty: Optional[float] = None,
    seed: int = 0,
) -> LatticeProfile:
    """
    Lattice spacings d = d0(r) (1 + eps_elastic) along rr, theta-theta and zz.

    ``noise`` and ``uncertainty`` are in Angstrom.
    """
    r = np.asarray(r, dtype=float)
    strain = elastic_strain(e, m, np.abs(r))[:, :3]
    spacing = d0.evaluate(np.abs(r))[:, None] * (1.0 + strain)
    if noise > 0.0:
        spacing = spacing + np.random.default_rng(seed).normal(0.0, noise, spacing.shape)
    spacing_u = None if uncertainty is None else np.full(spacing.shape, uncertainty)
    return LatticeProfile(r, spacing, spacing_u)


def section_grid(half_size: float, n_points: int, inset: float, axis: int = 0) -> np.ndarray:
    """n x n grid on the central section normal to ``axis``, inset from the faces."""
    line = np.linspace(-half_size + inset, half_size - inset, n_points)
    a, b = np.meshgrid(line, line, indexing="ij")
    points = np.zeros((a.size, 3))
    others = [k for k in range(3) if k != axis]
    points[:, others[0]] = a.ravel()
    points[:, others[1]] = b.ravel()
    return points


def synthetic_grid(
    potential: MaxwellPotential,
    points: np.ndarray,
    noise: float = 0.0,
    uncertainty: Optional[float] = None,
    seed: int = 0,
) -> StressSampleSet:
    """Maxwell stresses at points with optional Gaussian noise in Pa."""
    sigma = potential.stress(points)
    if noise > 0.0:
        sigma = sigma + np.random.default_rng(seed).normal(0.0, noise, sigma.shape)
    sigma_u = None if uncertainty is None else np.full(sigma.shape, uncertainty)
    return StressSampleSet(points, sigma, sigma_u)


def random_potential(
    half_size: float,
    z_order: int,
    plane_terms: int,
    stress_scale: float,
    seed: int = 0,
) -> MaxwellPotential:
    """Random potential whose peak stress on a 17^3 grid equals ``stress_scale`` Pa."""
    rng = np.random.default_rng(seed)
    n = 2 * z_order * plane_terms
    unit = MaxwellPotential.from_coefficients(rng.standard_normal(n), half_size, z_order, plane_terms)
    peak = field_diagnostics(unit, 17).max_stress
    return unit * (stress_scale / peak)


def write_fixture_set(output_dir: str, seed: int = 0) -> List[Path]:
    """
    Write profile.csv, lattice.csv and grid.csv for the shipped presets.

    The cylinder uses ``probe-1`` and the grid uses ``am-cube``.
    """
    store = FileArtifactStore(output_dir)
    probe = get_preset("probe-1")
    m = ElasticModel.from_gpa(probe.youngs_modulus_gpa, probe.poisson_ratio)
    R = probe.radius_mm * MM
    e = AxisymPolyField.from_normalized(
        [1.0e-3, 0.0, -2.0e-3, 0.0, -1.0e-3],
        [5.0e-3, 0.0, 1.0e-3, 0.0, -1.0e-3],
        [2.0e-3, 0.0, -1.0e-3, 0.0, 0.0],
        R,
    )
    r = sample_radii(R, 31)
    written = [
        store.write_text("profile.csv", profile_csv(synthetic_profile(e, m, r, 5.0 * MPA, 5.0 * MPA, seed))),
        store.write_text(
            "lattice.csv",
            lattice_csv(synthetic_lattice(e, m, D0Poly([3.6, 0.0, 2.0e-4], R, 3.6), r, 2.0e-5, 2.0e-5, seed)),
        ),
    ]

    cube = get_preset("am-cube")
    L = cube.half_size_mm * MM
    potential = random_potential(L, cube.z_order, cube.plane_terms, 300.0 * MPA, seed)
    points = section_grid(L, cube.grid_points, cube.grid_inset_mm * MM)
    written.append(store.write_text("grid.csv", grid_csv(synthetic_grid(potential, points, 10.0 * MPA, 10.0 * MPA, seed))))
    logger.info("Fixture set written", directory=str(store.root), files=[p.name for p in written])
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="eigenstrain.cli_io.fixtures", description="Write synthetic input files")
    parser.add_argument("output_dir")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    for path in write_fixture_set(args.output_dir, args.seed):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
