"""
Circuit layer: parameter validation, static flux solve, derived quantities.
"""

from .derived import derive_parameters, effective_frequency
from .flux import flux_residual, solve_flux_minimum

__all__ = [
    "solve_flux_minimum",
    "flux_residual",
    "derive_parameters",
    "effective_frequency",
]
