"""
Output power at stable operating points.

A point on the gamma_b = 0 curve where the pressure rate equals -gamma_b
with positive slope is a stable point for the intrinsic loss gamma_b. The
power dissipated there by the slow mode's intrinsic loss is the engine's
output power.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..constants import PHI0, Q_B_MAX
from ..models import DerivedParameters
from .curve import DissipationCurve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerPoint:
    """Stable operating point and its output power."""

    Q_b: float
    A_b: float
    gamma_b: float
    power: float  # W

    def to_dict(self) -> dict:
        return {"Q_b": self.Q_b, "A_b": self.A_b, "gamma_b": self.gamma_b, "power": self.power}


def output_power(derived: DerivedParameters, A_b, gamma_b: float):
    """P = 2 gamma_b A_b^2 (1 - N_L) Phi0^2 / (pi^2 L_b), in watts."""
    scale = 2.0 * (1.0 - derived.N_L) * PHI0 ** 2 / (math.pi ** 2 * derived.L_b)
    return scale * gamma_b * np.square(A_b)


def power_curve(derived: DerivedParameters, curve: DissipationCurve,
                q_b_max: float = Q_B_MAX) -> List[PowerPoint]:
    """Admissible (Q_b, A_b, P) triples, lowest amplitude first.

    For a gamma_b = 0 curve these are the sampled amplitudes on the rising
    branch of the primary valley with Q_b <= q_b_max. For a curve computed at
    a finite gamma_b they are its stable stationary points.
    """
    if curve.gamma_b > 0:
        q_b = derived.omega_b / curve.gamma_b
        if q_b > q_b_max:
            return []
        return [PowerPoint(Q_b=q_b, A_b=p.A_b, gamma_b=curve.gamma_b,
                           power=float(output_power(derived, p.A_b, curve.gamma_b)))
                for p in curve.stable()]

    valley = curve.primary_valley()
    if valley is None:
        return []
    start, stop = valley
    rate = curve.pressure_rate
    bottom = start + int(np.argmin(rate[start:stop]))
    points = []
    for i in range(bottom, stop):
        if i > bottom and rate[i] <= rate[i - 1]:
            break
        gamma_b = -float(rate[i])
        q_b = derived.omega_b / gamma_b
        if q_b > q_b_max:
            continue
        a = float(curve.amplitudes[i])
        points.append(PowerPoint(Q_b=q_b, A_b=a, gamma_b=gamma_b,
                                 power=float(output_power(derived, a, gamma_b))))
    return points


def stable_point_power(derived: DerivedParameters, curve: DissipationCurve,
                       q_b_max: float = Q_B_MAX) -> List[PowerPoint]:
    """Power at every admissible stable point; see `power_curve`."""
    return power_curve(derived, curve, q_b_max)


def max_power(derived: DerivedParameters, curve: DissipationCurve,
              q_b_max: float = Q_B_MAX) -> Optional[PowerPoint]:
    """The admissible stable point with the highest output power, if any."""
    points = power_curve(derived, curve, q_b_max)
    if not points:
        logger.debug("no admissible stable point (q_b_max=%g)", q_b_max)
        return None
    return max(points, key=lambda p: p.power)
