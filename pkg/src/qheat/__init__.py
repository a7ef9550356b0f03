"""
qheat: quasiclassical simulator of an autonomous superconducting heat engine
==============================================================================

A working-body resonator, tuned by a SQUID whose flux follows a slow
mechanical-like mode, exchanges energy with a hot and a cold bath through
filter resonators. The package evaluates the noise-driven dissipation of
the slow mode, its self-sustained operating points, output power, heat flow
and efficiency, and validates the frequency-domain pipeline against a
stochastic time-domain integrator.

Public API:
    from qheat import CircuitParameters, derive_parameters
    from qheat.slowdyn import dissipation_curve, max_power
    from qheat.thermo import heat_flow, otto_trajectory
"""

__version__ = "0.1.0"

from .circuit import derive_parameters, effective_frequency, solve_flux_minimum
from .errors import ConfigError, QHeatError
from .models import (
    CircuitParameters,
    DerivedParameters,
    DriveState,
    HeatFlowReport,
    SolverOptions,
    SweepRecord,
    SweepSpec,
)

__all__ = [
    # Models
    "CircuitParameters",
    "DerivedParameters",
    "DriveState",
    "SolverOptions",
    "HeatFlowReport",
    "SweepSpec",
    "SweepRecord",

    # Circuit
    "solve_flux_minimum",
    "derive_parameters",
    "effective_frequency",

    # Errors
    "QHeatError",
    "ConfigError",
]
