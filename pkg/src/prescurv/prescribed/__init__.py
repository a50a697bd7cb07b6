"""Prescribed diagonal curvature tensors under conformal change."""

from .problem import (Indeterminate, NonExistence, NoSolution, PrescribedProblem, ResidualStat,
                      Thresholds)
from .gradient import (family_residuals, governing_residual, governing_residuals, gradient_field,
                    integrability_residuals, gradient_data)
from .solve import (Solution, determine_scale, is_separable, reconstruct_log, reconstruct_phi,
                    separable_nonexistence, solve, sweep_families)
from .quadratic import (QuadraticFamily, SingularSet, classify_singular_set,
                        construct_quadratic_family, detect_quadratic_family)
from .single import (Completeness, SingleVariableSolution, completeness_flag, construct_from_h,
                     solve_single_variable)
from .lift import (LiftResult, Pairing, lift_to_background, oracle_tensor, pairing_check,
                   required_tensor, required_tensor_values)

__all__ = [
    "Indeterminate", "NonExistence", "NoSolution", "PrescribedProblem", "ResidualStat",
    "Thresholds", "family_residuals", "governing_residual", "governing_residuals",
    "gradient_field", "integrability_residuals", "gradient_data", "Solution", "determine_scale",
    "is_separable", "reconstruct_log", "reconstruct_phi", "separable_nonexistence", "solve",
    "sweep_families", "QuadraticFamily", "SingularSet", "classify_singular_set",
    "construct_quadratic_family", "detect_quadratic_family", "Completeness",
    "SingleVariableSolution", "completeness_flag", "construct_from_h", "solve_single_variable",
    "LiftResult", "Pairing", "lift_to_background", "oracle_tensor", "pairing_check",
    "required_tensor", "required_tensor_values",
]
