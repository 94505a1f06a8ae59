"""Closed-form eigenstrain analysis of long axisymmetric cylinders."""

from eigenstrain.axisym.d0 import D0FitResult, fit_with_d0
from eigenstrain.axisym.decomposition import decompose_poly, inner_product_poly, null_field
from eigenstrain.axisym.field import (
    AxisymPolyField,
    AxisymSolution,
    AxisymStressProfile,
    D0Poly,
    LatticeProfile,
)
from eigenstrain.axisym.fitting import AxisymFitResult, FitOptions, fit_stress
from eigenstrain.axisym.forward import (
    build_rhs,
    elastic_strain,
    forward_stress,
    particular_solution,
    solve,
    solve_constants,
)

__all__ = [
    "AxisymFitResult",
    "AxisymPolyField",
    "AxisymSolution",
    "AxisymStressProfile",
    "D0FitResult",
    "D0Poly",
    "FitOptions",
    "LatticeProfile",
    "build_rhs",
    "decompose_poly",
    "elastic_strain",
    "fit_stress",
    "fit_with_d0",
    "forward_stress",
    "inner_product_poly",
    "null_field",
    "particular_solution",
    "solve",
    "solve_constants",
]
