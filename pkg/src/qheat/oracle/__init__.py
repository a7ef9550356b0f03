"""
Time-domain stochastic oracle for the frequency-domain pipeline.
"""

from .ensemble import (
    driven_ensemble,
    driven_target,
    linear_ensemble,
    linear_target,
    sample_traces,
)
from .integrator import (
    FieldRun,
    check_damped,
    discretize,
    field_matrices,
    first_harmonic,
    propagate,
    simulate_driven,
    simulate_linear,
    state_matrices,
)
from .noise import NoiseTrace, max_step, synthesize_noise, welch_psd

__all__ = [
    "NoiseTrace",
    "synthesize_noise",
    "welch_psd",
    "max_step",
    "FieldRun",
    "field_matrices",
    "state_matrices",
    "discretize",
    "check_damped",
    "propagate",
    "simulate_linear",
    "simulate_driven",
    "first_harmonic",
    "linear_target",
    "linear_ensemble",
    "driven_target",
    "driven_ensemble",
    "sample_traces",
]
