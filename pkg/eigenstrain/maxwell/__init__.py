"""Maxwell stress potentials on a symmetric cube."""

from eigenstrain.maxwell.fitting import (
    ExtrapolationGuard,
    MaxwellFitResult,
    StressSampleSet,
    design_matrix,
    fit_stress_field,
    sample_field,
)
from eigenstrain.maxwell.polynomial import Poly3
from eigenstrain.maxwell.potential import (
    FieldDiagnostics,
    MaxwellPotential,
    build_symmetric_basis,
    field_diagnostics,
    plane_term_exponents,
    stress_from_lambdas,
    stress_from_potential,
)

__all__ = [
    "ExtrapolationGuard",
    "FieldDiagnostics",
    "MaxwellFitResult",
    "MaxwellPotential",
    "Poly3",
    "StressSampleSet",
    "build_symmetric_basis",
    "design_matrix",
    "field_diagnostics",
    "fit_stress_field",
    "plane_term_exponents",
    "sample_field",
    "stress_from_lambdas",
    "stress_from_potential",
]
