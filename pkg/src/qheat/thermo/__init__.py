"""
Thermodynamics: heat flow, efficiencies and the working-body Otto cycle.
"""

from .cycle import CycleTrajectory, inductive_energy, loop_area, otto_trajectory
from .heat import (
    carnot,
    efficiency,
    heat_flow,
    heat_flow_sensitivity,
    linear_greens,
    otto_band,
)

__all__ = [
    "heat_flow",
    "efficiency",
    "heat_flow_sensitivity",
    "linear_greens",
    "otto_band",
    "carnot",
    "CycleTrajectory",
    "otto_trajectory",
    "inductive_energy",
    "loop_area",
]
