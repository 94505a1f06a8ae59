"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from eigenstrain.fem.mesh import build_box_mesh
from eigenstrain.tensor_core import ElasticModel


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: refinement studies on meshes of 16^3 cells or more")


@pytest.fixture
def bronze():
    """Cylinder material, 130 GPa and 0.34."""
    return ElasticModel.from_gpa(130.0, 0.34)


@pytest.fixture
def inconel():
    """Cube material, 208 GPa and 0.28."""
    return ElasticModel.from_gpa(208.0, 0.28)


@pytest.fixture
def unit_mesh():
    """4^3 cells on [-1, 1]^3."""
    return build_box_mesh(1.0, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
