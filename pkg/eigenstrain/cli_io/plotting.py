"""SVG figures for eyeball comparison of fits and reconstructions."""

import io
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from eigenstrain.constants import MM, MPA, SVG_HASH_SALT, VOIGT_LABELS  # noqa: E402
from eigenstrain.fem.fields import GridTensorField  # noqa: E402
from eigenstrain.lrt import ProjectionImage  # noqa: E402
from eigenstrain.maxwell.potential import MaxwellPotential  # noqa: E402

CYLINDER_LABELS = ("rr", "tt", "zz")
CYLINDER_COLORS = ("tab:blue", "tab:orange", "tab:green")


def figure_svg(fig, stamp: bool = False) -> bytes:
    """
    Render a figure to SVG and close it.

    Without ``stamp`` the output is byte-reproducible: the id salt is fixed
    and the date metadata is dropped.
    """
    buffer = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig.savefig(buffer, format="svg", metadata=None if stamp else {"Date": None})
    plt.close(fig)
    return buffer.getvalue()


def axisym_profile_figure(
    r_plot: np.ndarray,
    stress: np.ndarray,
    eigenstrain: Optional[np.ndarray] = None,
    measured_r: Optional[np.ndarray] = None,
    measured: Optional[np.ndarray] = None,
    uncertainty: Optional[np.ndarray] = None,
    title: str = "",
):
    """
    Stress components (top) and eigenstrain components (bottom) against radius.

    Args:
        r_plot: Radii of the model curves in meters
        stress: Model stresses in Pa, shape (n, 3) ordered rr, tt, zz
        eigenstrain: Model eigenstrain, shape (n, 3)
        measured_r: Radii of measured samples
        measured: Measured stresses in Pa, shape (m, 3)
        uncertainty: Measured standard deviations in Pa, shape (m, 3)
    """
    rows = 2 if eigenstrain is not None else 1
    fig, axes = plt.subplots(rows, 1, figsize=(6.0, 3.2 * rows), sharex=True, squeeze=False)
    ax = axes[0, 0]
    for k, (label, color) in enumerate(zip(CYLINDER_LABELS, CYLINDER_COLORS)):
        ax.plot(r_plot / MM, stress[:, k] / MPA, color=color, label=f"sigma_{label}")
        if measured is not None:
            err = None if uncertainty is None else uncertainty[:, k] / MPA
            ax.errorbar(measured_r / MM, measured[:, k] / MPA, yerr=err, fmt="o", ms=3, color=color, alpha=0.7)
    ax.set_ylabel("stress (MPa)")
    ax.axhline(0.0, color="0.6", lw=0.5)
    ax.legend(loc="best", fontsize="small")
    if title:
        ax.set_title(title)
    if eigenstrain is not None:
        ax = axes[1, 0]
        for k, (label, color) in enumerate(zip(CYLINDER_LABELS, CYLINDER_COLORS)):
            ax.plot(r_plot / MM, eigenstrain[:, k] * 1e6, color=color, label=f"eps*_{label}")
        ax.set_ylabel("eigenstrain (microstrain)")
        ax.axhline(0.0, color="0.6", lw=0.5)
        ax.legend(loc="best", fontsize="small")
    axes[-1, 0].set_xlabel("r (mm)")
    fig.tight_layout()
    return fig


def _plane_grid(half_size: float, resolution: int, axis: int):
    line = np.linspace(-half_size, half_size, resolution)
    a, b = np.meshgrid(line, line, indexing="xy")
    points = np.zeros((a.size, 3))
    others = [k for k in range(3) if k != axis]
    points[:, others[0]] = a.ravel()
    points[:, others[1]] = b.ravel()
    return points, others


def heatmap_figure(values: np.ndarray, half_size: float, others: Sequence[int], title: str = ""):
    """Six stress components on a square section, values of shape (res*res, 6) in Pa."""
    resolution = int(round(np.sqrt(len(values))))
    names = "xyz"
    fig, axes = plt.subplots(2, 3, figsize=(10.0, 6.2))
    extent = [-half_size / MM, half_size / MM, -half_size / MM, half_size / MM]
    for k, ax in enumerate(axes.ravel()):
        image = values[:, k].reshape(resolution, resolution) / MPA
        limit = float(np.max(np.abs(image))) or 1.0
        mappable = ax.imshow(image, origin="lower", extent=extent, cmap="RdBu_r", vmin=-limit, vmax=limit)
        ax.set_title(f"sigma_{VOIGT_LABELS[k]} (MPa)", fontsize="small")
        ax.set_xlabel(f"{names[others[0]]} (mm)")
        ax.set_ylabel(f"{names[others[1]]} (mm)")
        fig.colorbar(mappable, ax=ax, shrink=0.8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def maxwell_section_figure(potential: MaxwellPotential, resolution: int, axis: int = 0, title: str = ""):
    """Heat maps of a Maxwell stress field on the central section normal to ``axis``."""
    points, others = _plane_grid(potential.half_size, resolution, axis)
    return heatmap_figure(potential.stress(points), potential.half_size, others, title)


def maxwell_axis_figure(potential: MaxwellPotential, n_points: int = 201, title: str = ""):
    """Stress components along the central y and z axes."""
    L = potential.half_size
    line = np.linspace(-L, L, n_points)
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.6), sharey=True)
    for ax, axis, name in zip(axes, (1, 2), ("y", "z")):
        points = np.zeros((n_points, 3))
        points[:, axis] = line
        stress = potential.stress(points)
        for k, label in enumerate(VOIGT_LABELS[:3]):
            ax.plot(line / MM, stress[:, k] / MPA, label=f"sigma_{label}")
        ax.axhline(0.0, color="0.6", lw=0.5)
        ax.set_xlabel(f"{name} (mm)")
        ax.legend(loc="best", fontsize="small")
    axes[0].set_ylabel("stress (MPa)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def field_section_figure(fields: Sequence[GridTensorField], titles: Sequence[str], component: int, resolution: int = 65):
    """One component of several fields on the central x = 0 section, side by side."""
    mesh = fields[0].mesh
    L = mesh.half_size
    points, others = _plane_grid(min(L), resolution, 0)
    fig, axes = plt.subplots(1, len(fields), figsize=(3.4 * len(fields), 3.2), squeeze=False)
    extent = [-L[others[0]] / MM, L[others[0]] / MM, -L[others[1]] / MM, L[others[1]] / MM]
    values = [f.evaluate(points)[:, component].reshape(resolution, resolution) for f in fields]
    limit = max(float(np.max(np.abs(v))) for v in values) or 1.0
    for ax, image, title in zip(axes[0], values, titles):
        mappable = ax.imshow(image, origin="lower", extent=extent, cmap="RdBu_r", vmin=-limit, vmax=limit)
        ax.set_title(title, fontsize="small")
        ax.set_xlabel("y (mm)")
        ax.set_ylabel("z (mm)")
    fig.colorbar(mappable, ax=list(axes[0]), shrink=0.8)
    return fig


def projection_figure(image: ProjectionImage, title: str = ""):
    """Ray-averaged strain on the detector."""
    coords = image.geometry.coordinates / MM
    half = 0.5 * image.geometry.pixel_pitch / MM
    extent = [coords[0] - half, coords[-1] + half, coords[0] - half, coords[-1] + half]
    fig, ax = plt.subplots(figsize=(4.8, 4.0))
    average = np.ma.masked_invalid(image.average_strain * 1e6)
    mappable = ax.imshow(average, origin="lower", extent=extent, cmap="viridis")
    fig.colorbar(mappable, ax=ax, label="mean strain (microstrain)")
    ax.set_xlabel("u (mm)")
    ax.set_ylabel("v (mm)")
    ax.set_title(title or f"direction {np.round(image.direction, 4).tolist()}", fontsize="small")
    fig.tight_layout()
    return fig
