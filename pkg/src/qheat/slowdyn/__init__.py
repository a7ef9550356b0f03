"""
Slow-mode dynamics: noise pressure, total dissipation, stationary points,
output power and envelope integration.
"""

from .curve import (
    DissipationCurve,
    NullCheck,
    StationaryPoint,
    amplitude_grid,
    dissipation_curve,
    null_engine_check,
    q_thresholds,
    total_dissipation,
)
from .evolve import AmplitudeTrajectory, PressureTable, integrate_amplitude_phase
from .power import PowerPoint, max_power, output_power, power_curve, stable_point_power
from .pressure import PressureEvaluator, PressureHarmonics, noise_pressure, pressure_harmonics

__all__ = [
    "PressureEvaluator",
    "PressureHarmonics",
    "noise_pressure",
    "pressure_harmonics",
    "DissipationCurve",
    "StationaryPoint",
    "NullCheck",
    "amplitude_grid",
    "total_dissipation",
    "dissipation_curve",
    "q_thresholds",
    "null_engine_check",
    "PowerPoint",
    "output_power",
    "power_curve",
    "stable_point_power",
    "max_power",
    "AmplitudeTrajectory",
    "PressureTable",
    "integrate_amplitude_phase",
]
