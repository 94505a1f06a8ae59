"""Data files, figures and fixtures for the command-line pipelines."""

from eigenstrain.cli_io.csv_io import (
    field_csv,
    grid_csv,
    lattice_csv,
    parse_field_csv,
    parse_grid_csv,
    parse_lattice_csv,
    parse_profile_csv,
    profile_csv,
    projection_csv,
)

__all__ = [
    "field_csv",
    "grid_csv",
    "lattice_csv",
    "parse_field_csv",
    "parse_grid_csv",
    "parse_lattice_csv",
    "parse_profile_csv",
    "profile_csv",
    "projection_csv",
]
