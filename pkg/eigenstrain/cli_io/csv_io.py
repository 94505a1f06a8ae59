"""CSV ingestion and emission with explicit units in every column name."""

from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog

from eigenstrain.axisym.field import AxisymStressProfile, LatticeProfile
from eigenstrain.constants import CSV_FLOAT_FORMAT, MM_PER_M, MPA, VOIGT_LABELS
from eigenstrain.errors import DataError, ParseError
from eigenstrain.fem.fields import Convention, GridTensorField
from eigenstrain.fem.mesh import BoxMesh, build_box_mesh
from eigenstrain.lrt import ProjectionImage
from eigenstrain.maxwell.fitting import StressSampleSet
from eigenstrain.utils import PathLike, missing_fields

logger = structlog.get_logger()

PROFILE_COLUMNS = ["r_mm", "sigma_rr_MPa", "sigma_tt_MPa", "sigma_zz_MPa"]
PROFILE_UNCERTAINTY = ["u_rr_MPa", "u_tt_MPa", "u_zz_MPa"]
LATTICE_COLUMNS = ["r_mm", "d_rr_A", "d_tt_A", "d_zz_A"]
LATTICE_UNCERTAINTY = ["u_rr_A", "u_tt_A", "u_zz_A"]
COORDINATE_COLUMNS = ["x_mm", "y_mm", "z_mm"]
STRESS_COLUMNS = [f"sigma_{c}_MPa" for c in VOIGT_LABELS]
STRESS_UNCERTAINTY = [f"u_{c}_MPa" for c in VOIGT_LABELS]
STRAIN_COLUMNS = [f"eps_{c}" for c in VOIGT_LABELS]
PROJECTION_COLUMNS = ["u_mm", "v_mm", "lrt_mm", "path_mm", "mean_strain"]

# header is line 1, first data row line 2
FIRST_DATA_LINE = 2


def _to_float(text: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        return np.nan
    return value if np.isfinite(value) else np.nan


def _read_table(
    path: PathLike,
    required: Sequence[str],
    optional: Sequence[str] = (),
) -> Tuple[np.ndarray, bool]:
    """
    Read the named numeric columns of a CSV file.

    Cells are parsed with Python's float so decimal text round-trips exactly.

    Returns:
        Tuple of (values of shape (n_rows, n_columns), whether the optional
        columns were present)

    Raises:
        DataError: If the file does not exist
        ParseError: On missing columns, partial optional groups or bad cells
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Input file not found: {path}", path=str(path))
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise ParseError("File is empty", path=str(path), line=1)
    except pd.errors.ParserError as e:
        raise ParseError(f"Malformed CSV: {e}", path=str(path))
    frame.columns = [str(c).strip() for c in frame.columns]

    missing = missing_fields(frame.columns, list(required))
    if missing:
        raise ParseError(f"Missing column(s): {', '.join(missing)}", path=str(path), line=1)
    present = [c for c in optional if c in frame.columns]
    if present and len(present) != len(optional):
        raise ParseError(
            f"Uncertainty columns must all be present or all absent, found {', '.join(present)}",
            path=str(path),
            line=1,
        )

    columns = list(required) + present
    values = np.empty((len(frame), len(columns)))
    for j, name in enumerate(columns):
        cells = frame[name].astype(str).str.strip()
        values[:, j] = cells.map(_to_float).to_numpy(dtype=float)
        bad = np.flatnonzero(np.isnan(values[:, j]))
        if bad.size:
            row = int(bad[0])
            raise ParseError(
                f"Non-numeric value '{cells.iloc[row]}' in column {name}",
                path=str(path),
                line=row + FIRST_DATA_LINE,
                column=name,
            )
    return values, bool(present)


def parse_profile_csv(path: PathLike, radius: Optional[float] = None) -> AxisymStressProfile:
    """
    Read a measured radial stress profile.

    Diameter-spanning data is folded onto r >= 0 by taking |r|; row order is
    preserved.

    Args:
        path: CSV with r_mm, sigma_rr_MPa, sigma_tt_MPa, sigma_zz_MPa and
            optionally u_rr_MPa, u_tt_MPa, u_zz_MPa
        radius: Cylinder radius in meters; rows with |r| > R are rejected

    Returns:
        AxisymStressProfile in SI units
    """
    values, has_uncertainty = _read_table(path, PROFILE_COLUMNS, PROFILE_UNCERTAINTY)
    if len(values) == 0:
        raise DataError(f"Stress profile {path} has no data rows", path=str(path))
    r = np.abs(values[:, 0]) / MM_PER_M
    _check_radius(r, radius, path)
    uncertainty = values[:, 4:7] * MPA if has_uncertainty else None
    logger.info("Stress profile read", path=str(path), rows=len(r), uncertainty=has_uncertainty)
    return AxisymStressProfile.from_array(r, values[:, 1:4] * MPA, uncertainty)


def parse_lattice_csv(path: PathLike, radius: Optional[float] = None) -> LatticeProfile:
    """Read lattice spacings in Angstrom per direction; folded like stress profiles."""
    values, has_uncertainty = _read_table(path, LATTICE_COLUMNS, LATTICE_UNCERTAINTY)
    if len(values) == 0:
        raise DataError(f"Lattice profile {path} has no data rows", path=str(path))
    r = np.abs(values[:, 0]) / MM_PER_M
    _check_radius(r, radius, path)
    logger.info("Lattice profile read", path=str(path), rows=len(r), uncertainty=has_uncertainty)
    return LatticeProfile(r, values[:, 1:4], values[:, 4:7] if has_uncertainty else None)


def _check_radius(r: np.ndarray, radius: Optional[float], path: PathLike):
    if radius is None:
        return
    outside = np.flatnonzero(r > radius * (1.0 + 1e-12))
    if outside.size:
        row = int(outside[0])
        raise ParseError(
            f"|r| = {r[row] * MM_PER_M:g} mm exceeds the radius {radius * MM_PER_M:g} mm",
            path=str(path),
            line=row + FIRST_DATA_LINE,
        )


def parse_grid_csv(path: PathLike, half_size: Optional[float] = None) -> StressSampleSet:
    """
    Read pointwise stress samples inside the cube.

    Duplicate points are kept and reported as a warning.

    Args:
        path: CSV with x_mm, y_mm, z_mm, the six sigma_*_MPa columns and
            optionally the six u_*_MPa columns
        half_size: Cube half size L in meters; points outside [-L, L]^3 are rejected

    Returns:
        StressSampleSet in SI units
    """
    values, has_uncertainty = _read_table(path, COORDINATE_COLUMNS + STRESS_COLUMNS, STRESS_UNCERTAINTY)
    if len(values) == 0:
        raise DataError(f"Stress grid {path} has no data rows", path=str(path))
    samples = StressSampleSet(
        values[:, 0:3] / MM_PER_M,
        values[:, 3:9] * MPA,
        values[:, 9:15] * MPA if has_uncertainty else None,
    )
    if half_size is not None:
        outside = samples.outside(half_size)
        if outside.size:
            row = int(outside[0])
            raise ParseError(
                f"Point {values[row, 0:3].tolist()} mm lies outside the cube of half size {half_size * MM_PER_M:g} mm",
                path=str(path),
                line=row + FIRST_DATA_LINE,
            )
    for group in samples.duplicate_groups():
        logger.warning(
            "Duplicate grid point",
            path=str(path),
            lines=[row + FIRST_DATA_LINE for row in group],
        )
    logger.info("Stress grid read", path=str(path), rows=samples.n_points, uncertainty=has_uncertainty)
    return samples


def _mesh_from_coordinates(coords: np.ndarray, path: PathLike) -> Tuple[BoxMesh, np.ndarray]:
    """Box mesh whose nodes are the given points, and the row of each node."""
    axes = [np.unique(coords[:, k]) for k in range(3)]
    if int(np.prod([a.size for a in axes])) != len(coords):
        raise ParseError("Field points do not form a complete regular grid", path=str(path))
    half_size = []
    for a in axes:
        if a.size < 3 or not np.allclose(a, -a[::-1], rtol=0.0, atol=1e-9 * np.max(np.abs(a))):
            raise ParseError("Field grid must be centered on the origin with at least 3 nodes per axis", path=str(path))
        if not np.allclose(np.diff(a), np.diff(a)[0], rtol=1e-9):
            raise ParseError("Field grid spacing must be uniform", path=str(path))
        half_size.append(float(a[-1]))
    mesh = build_box_mesh(tuple(half_size), tuple(a.size - 1 for a in axes))
    i, j, k = (np.searchsorted(a, coords[:, n]) for n, a in enumerate(axes))
    nx, ny, _ = mesh.cells
    node = i + (nx + 1) * (j + (ny + 1) * k)
    if np.unique(node).size != len(node):
        raise ParseError("Field grid contains duplicate points", path=str(path))
    order = np.empty(len(node), dtype=np.int64)
    order[node] = np.arange(len(node))
    return mesh, order


def parse_field_csv(path: PathLike) -> Tuple[GridTensorField, str]:
    """
    Read a nodal field dump written by :func:`field_csv`.

    Returns:
        Tuple of (nodal field in SI units, ``"stress"`` or ``"strain"``)
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Input file not found: {path}", path=str(path))
    try:
        header = [str(c).strip() for c in pd.read_csv(path, nrows=0).columns]
    except pd.errors.EmptyDataError:
        raise ParseError("File is empty", path=str(path), line=1)
    kind = "stress" if STRESS_COLUMNS[0] in header else "strain"
    columns = STRESS_COLUMNS if kind == "stress" else STRAIN_COLUMNS
    values, _ = _read_table(path, COORDINATE_COLUMNS + columns)
    if len(values) == 0:
        raise DataError(f"Field dump {path} has no data rows", path=str(path))
    mesh, order = _mesh_from_coordinates(values[:, 0:3] / MM_PER_M, path)
    data = values[order, 3:9] * (MPA if kind == "stress" else 1.0)
    logger.info("Field dump read", path=str(path), kind=kind, cells=mesh.cells)
    return GridTensorField(mesh, data, Convention.NODAL), kind


def _to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def profile_csv(profile: AxisymStressProfile) -> str:
    """Profile CSV text in mm and MPa."""
    data = {"r_mm": profile.r * MM_PER_M}
    for name, column in zip(PROFILE_COLUMNS[1:], profile.stress.T):
        data[name] = column / MPA
    if profile.uncertainty is not None:
        for name, column in zip(PROFILE_UNCERTAINTY, profile.uncertainty.T):
            data[name] = column / MPA
    return _to_csv(pd.DataFrame(data))


def lattice_csv(lattice: LatticeProfile) -> str:
    """Lattice CSV text in mm and Angstrom."""
    data = {"r_mm": lattice.r * MM_PER_M}
    for name, column in zip(LATTICE_COLUMNS[1:], lattice.spacing.T):
        data[name] = column
    if lattice.uncertainty is not None:
        for name, column in zip(LATTICE_UNCERTAINTY, lattice.uncertainty.T):
            data[name] = column
    return _to_csv(pd.DataFrame(data))


def grid_csv(samples: StressSampleSet) -> str:
    """Stress sample CSV text in mm and MPa."""
    data = {name: samples.points[:, k] * MM_PER_M for k, name in enumerate(COORDINATE_COLUMNS)}
    for k, name in enumerate(STRESS_COLUMNS):
        data[name] = samples.sigma[:, k] / MPA
    if samples.uncertainty is not None:
        for k, name in enumerate(STRESS_UNCERTAINTY):
            data[name] = samples.uncertainty[:, k] / MPA
    return _to_csv(pd.DataFrame(data))


def field_csv(field_values: GridTensorField, kind: str) -> str:
    """Nodal dump of a tensor field; Gauss fields are averaged to the nodes first."""
    nodal = field_values.to_nodal()
    points = nodal.mesh.nodes
    data = {name: points[:, k] * MM_PER_M for k, name in enumerate(COORDINATE_COLUMNS)}
    names = STRESS_COLUMNS if kind == "stress" else STRAIN_COLUMNS
    scale = MPA if kind == "stress" else 1.0
    for k, name in enumerate(names):
        data[name] = nodal.values[:, k] / scale
    return _to_csv(pd.DataFrame(data))


def projection_csv(image: ProjectionImage) -> str:
    """One row per detector pixel, u fastest."""
    coords = image.geometry.coordinates
    u, v = np.meshgrid(coords, coords, indexing="xy")
    columns = [
        u.ravel() * MM_PER_M,
        v.ravel() * MM_PER_M,
        image.values.ravel() * MM_PER_M,
        image.path_length.ravel() * MM_PER_M,
        image.average_strain.ravel(),
    ]
    frame = pd.DataFrame(dict(zip(PROJECTION_COLUMNS, columns)))
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", na_rep="nan")


def table_text(rows: List[dict], columns: Sequence[str]) -> str:
    """Plain-text table for stdout."""
    frame = pd.DataFrame(rows, columns=list(columns))
    return frame.to_string(index=False, float_format=lambda v: f"{v:.6g}") + "\n"


def table_csv(rows: List[dict], columns: Sequence[str]) -> str:
    """Rows of plain values as CSV text."""
    return _to_csv(pd.DataFrame(rows, columns=list(columns)))
