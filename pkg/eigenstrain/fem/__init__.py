"""Structured trilinear finite elements on box domains."""

from eigenstrain.fem.element import QuadratureRule
from eigenstrain.fem.fields import Convention, GridTensorField, GridVectorField, sample_points
from eigenstrain.fem.mesh import BoxMesh, build_box_mesh

__all__ = [
    "BoxMesh",
    "Convention",
    "GridTensorField",
    "GridVectorField",
    "QuadratureRule",
    "build_box_mesh",
    "sample_points",
]
