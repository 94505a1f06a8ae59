"""Tests for CSV ingestion and emission."""

import numpy as np
import pytest

from eigenstrain.axisym.field import AxisymStressProfile
from eigenstrain.cli_io.csv_io import (
    field_csv,
    parse_field_csv,
    parse_grid_csv,
    parse_lattice_csv,
    parse_profile_csv,
    profile_csv,
    projection_csv,
    table_text,
)
from eigenstrain.constants import MM, MPA
from eigenstrain.errors import DataError, ParseError
from eigenstrain.fem.fields import GridTensorField
from eigenstrain.fem.mesh import build_box_mesh
from eigenstrain.lrt import DetectorGeometry, simulate_projections

PROFILE_HEADER = "r_mm,sigma_rr_MPa,sigma_tt_MPa,sigma_zz_MPa"
GRID_HEADER = "x_mm,y_mm,z_mm,sigma_xx_MPa,sigma_yy_MPa,sigma_zz_MPa,sigma_xy_MPa,sigma_yz_MPa,sigma_xz_MPa"


def write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


def test_profile_is_folded_and_converted(tmp_path):
    """Negative radii fold onto |r| and units become SI."""
    path = write(tmp_path, "profile.csv", [PROFILE_HEADER, "-1.0,10,20,30", "0.5,-1.5,0,2.25"])
    profile = parse_profile_csv(path, radius=1.5 * MM)
    np.testing.assert_allclose(profile.r, [1.0e-3, 0.5e-3])
    np.testing.assert_allclose(profile.stress[0], [10e6, 20e6, 30e6])
    assert profile.uncertainty is None


def test_profile_beyond_radius_names_the_line(tmp_path):
    """A radius larger than R is reported with file and line."""
    path = write(tmp_path, "profile.csv", [PROFILE_HEADER, "0.0,1,1,1", "1.6,1,1,1"])
    with pytest.raises(ParseError) as excinfo:
        parse_profile_csv(path, radius=1.5 * MM)
    assert excinfo.value.line == 3
    assert str(excinfo.value).startswith(f"{path}:3: ")


def test_missing_column(tmp_path):
    """Missing required columns are reported against the header line."""
    path = write(tmp_path, "profile.csv", ["r_mm,sigma_rr_MPa,sigma_tt_MPa", "0,1,2"])
    with pytest.raises(ParseError) as excinfo:
        parse_profile_csv(path)
    assert excinfo.value.line == 1
    assert "sigma_zz_MPa" in str(excinfo.value)


def test_non_numeric_cell(tmp_path):
    """A bad cell is reported with its data line."""
    path = write(tmp_path, "profile.csv", [PROFILE_HEADER, "0,1,2,3", "0.1,1,abc,3"])
    with pytest.raises(ParseError) as excinfo:
        parse_profile_csv(path)
    assert excinfo.value.line == 3
    assert excinfo.value.details["column"] == "sigma_tt_MPa"


def test_header_only_file(tmp_path):
    """A file without data rows is a data error."""
    path = write(tmp_path, "profile.csv", [PROFILE_HEADER])
    with pytest.raises(DataError, match="has no data rows"):
        parse_profile_csv(path)


def test_partial_uncertainty_group(tmp_path):
    """Uncertainty columns come as a complete group or not at all."""
    path = write(tmp_path, "profile.csv", [PROFILE_HEADER + ",u_rr_MPa", "0,1,2,3,0.5"])
    with pytest.raises(ParseError):
        parse_profile_csv(path)


def test_missing_file(tmp_path):
    with pytest.raises(DataError):
        parse_profile_csv(tmp_path / "absent.csv")


def test_profile_text_round_trip(tmp_path):
    """Written profiles read back to within one unit in the last place."""
    profile = AxisymStressProfile.from_array(
        np.array([0.0, 0.3e-3, 1.1e-3]),
        np.array([[1.0, 2.0, 3.0], [-4.5, 0.1, 7.0], [1e-3, 2e2, -3e1]]) * MPA,
        np.full((3, 3), 5.0 * MPA),
    )
    path = tmp_path / "profile.csv"
    path.write_text(profile_csv(profile))
    back = parse_profile_csv(path)
    for got, want in ((back.r, profile.r), (back.stress, profile.stress), (back.uncertainty, profile.uncertainty)):
        assert np.all(np.abs(got - want) <= np.spacing(np.abs(want)))


def test_lattice_profile(tmp_path):
    """Lattice spacings stay in Angstrom with their uncertainties."""
    path = write(
        tmp_path,
        "lattice.csv",
        ["r_mm,d_rr_A,d_tt_A,d_zz_A,u_rr_A,u_tt_A,u_zz_A", "0.0,3.6,3.6001,3.5999,1e-5,1e-5,1e-5"],
    )
    lattice = parse_lattice_csv(path, radius=1.0 * MM)
    np.testing.assert_allclose(lattice.spacing, [[3.6, 3.6001, 3.5999]])
    np.testing.assert_allclose(lattice.uncertainty, 1e-5)


def test_grid_outside_cube(tmp_path):
    """Points beyond the cube are rejected with their line."""
    path = write(tmp_path, "grid.csv", [GRID_HEADER, "0,0,0,1,1,1,0,0,0", "0,9.0,0,1,1,1,0,0,0"])
    with pytest.raises(ParseError) as excinfo:
        parse_grid_csv(path, half_size=8.5 * MM)
    assert excinfo.value.line == 3


def test_grid_duplicates_are_kept(tmp_path):
    """Duplicate coordinates are read, not rejected."""
    path = write(tmp_path, "grid.csv", [GRID_HEADER, "1,2,3,1,1,1,0,0,0", "1,2,3,2,2,2,0,0,0"])
    samples = parse_grid_csv(path, half_size=8.5 * MM)
    assert samples.n_points == 2
    assert samples.duplicate_groups() == [[0, 1]]
    np.testing.assert_allclose(samples.points[0], [1e-3, 2e-3, 3e-3])


def test_field_dump_infers_mesh(tmp_path, rng):
    """A nodal dump reads back onto the same grid."""
    mesh = build_box_mesh((2.0 * MM, 1.0 * MM, 3.0 * MM), (2, 4, 3))
    field = GridTensorField(mesh, rng.standard_normal((mesh.n_nodes, 6)) * MPA)
    path = tmp_path / "stress_field.csv"
    path.write_text(field_csv(field, "stress"))
    back, kind = parse_field_csv(path)
    assert kind == "stress"
    assert back.mesh.cells == (2, 4, 3)
    np.testing.assert_allclose(back.mesh.half_size, mesh.half_size, rtol=1e-14)
    np.testing.assert_allclose(back.values, field.values, rtol=1e-13, atol=1e-9)


def test_field_dump_needs_centered_grid(tmp_path):
    """Grids off the origin cannot describe a box mesh."""
    lines = ["x_mm,y_mm,z_mm,eps_xx,eps_yy,eps_zz,eps_xy,eps_yz,eps_xz"]
    for z in (0.0, 1.0, 2.0):
        for y in (0.0, 1.0, 2.0):
            for x in (0.0, 1.0, 2.0):
                lines.append(f"{x},{y},{z},0,0,0,0,0,0")
    with pytest.raises(ParseError):
        parse_field_csv(write(tmp_path, "strain_field.csv", lines))


def test_projection_csv(unit_mesh):
    """Pixels that miss the box are written as nan."""
    field = GridTensorField.constant(unit_mesh, [0.0, 0.0, 1e-3, 0.0, 0.0, 0.0])
    image = simulate_projections(field, DetectorGeometry.covering(unit_mesh, 4), [[0.0, 0.0, 1.0]])[0]
    lines = projection_csv(image).splitlines()
    assert lines[0] == "u_mm,v_mm,lrt_mm,path_mm,mean_strain"
    assert len(lines) == 17
    assert sum(line.endswith(",nan") for line in lines[1:]) == 12


def test_table_text():
    """Tables carry their column headers."""
    text = table_text([{"cells": 4, "error": 0.125}], ["cells", "error"])
    assert "cells" in text.splitlines()[0]
    assert "0.125" in text
