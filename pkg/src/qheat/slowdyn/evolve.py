"""
Slowly varying amplitude and phase of the slow mode.

    dA_b/dt       = -gamma_b A_b - (g_b^2 / 2 omega_b) Im X(A_b)
    A_b dtheta/dt = -(g_b^2 / 2 omega_b) Re X(A_b)

X is the gauge-free noise pressure. Each evaluation of X costs a full
sideband solve, so values are kept in a table and interpolated while the
amplitude stays within the cache tolerance of known nodes.
"""

import bisect
import logging
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from ..constants import PRESSURE_CACHE_RTOL
from ..errors import PreconditionViolated, StiffnessDetected
from ..models import DerivedParameters, DriveState, SolverOptions
from ..spectral import FrequencyGrid
from .curve import DissipationCurve
from .pressure import PressureEvaluator

logger = logging.getLogger(__name__)

# |Gamma_tot| / omega_b above which the envelope equations are not trusted
SLOW_REGIME_LIMIT = 1e-2
AMPLITUDE_FLOOR = 1e-12


class PressureTable:
    """Amplitude-indexed cache of the noise pressure with linear interpolation."""

    def __init__(self, evaluator: PressureEvaluator, rtol: float = PRESSURE_CACHE_RTOL):
        self.evaluator = evaluator
        self.rtol = rtol
        self._nodes: List[float] = []
        self._values: Dict[float, complex] = {}
        self._lock = threading.Lock()
        self.evaluations = 0

    @classmethod
    def from_curve(cls, evaluator: PressureEvaluator, curve: DissipationCurve,
                   rtol: float = PRESSURE_CACHE_RTOL) -> "PressureTable":
        table = cls(evaluator, rtol)
        for a, x in zip(curve.amplitudes, curve.noise_pressure):
            table._insert(float(a), complex(x))
        return table

    def _insert(self, a: float, value: complex) -> None:
        with self._lock:
            if a not in self._values:
                bisect.insort(self._nodes, a)
            self._values[a] = value

    def __call__(self, a: float) -> complex:
        if a <= AMPLITUDE_FLOOR:
            return 0j
        i = bisect.bisect_left(self._nodes, a)
        lo = self._nodes[i - 1] if i > 0 else None
        hi = self._nodes[i] if i < len(self._nodes) else None
        tol = self.rtol * a
        if hi is not None and hi == a:
            return self._values[hi]
        if lo is not None and hi is not None and hi - lo <= tol:
            w = (a - lo) / (hi - lo)
            return (1.0 - w) * self._values[lo] + w * self._values[hi]
        value = self.evaluator.pressure(a)
        self.evaluations += 1
        self._insert(a, value)
        return value


@dataclass
class AmplitudeTrajectory:
    """Time series of the slow-mode envelope."""

    t: np.ndarray
    A_b: np.ndarray
    theta_b: np.ndarray
    theta_dot: np.ndarray = field(repr=False)
    gamma_b: float = 0.0
    evaluations: int = 0

    @property
    def final(self) -> DriveState:
        return DriveState(A_b=max(float(self.A_b[-1]), 0.0), theta_b=float(self.theta_b[-1]))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "A_b": self.A_b, "theta_b": self.theta_b,
                             "theta_dot": self.theta_dot})


def integrate_amplitude_phase(derived: DerivedParameters, initial: DriveState, gamma_b: float,
                              t_end: float, options: Optional[SolverOptions] = None,
                              grid: Optional[FrequencyGrid] = None,
                              curve: Optional[DissipationCurve] = None,
                              cache_rtol: float = PRESSURE_CACHE_RTOL, rtol: float = 1e-6,
                              atol: float = 1e-10, max_step: float = np.inf,
                              samples: int = 1000) -> AmplitudeTrajectory:
    """Integrate the envelope equations from `initial` up to `t_end` (s).

    Args:
        derived: Derived circuit parameters.
        initial: Starting amplitude and phase.
        gamma_b: Intrinsic loss rate of the slow mode (rad/s).
        t_end: End time (s).
        options: Solver options for the pressure evaluations.
        grid: Frequency grid; built from `options` when omitted.
        curve: Optional precomputed curve used to seed the pressure table.
        cache_rtol: Relative amplitude spacing below which the table interpolates.
        rtol, atol, max_step: Step controller of the adaptive RK45 integrator.
        samples: Number of output times.

    Raises:
        PreconditionViolated: if t_end <= 0 or the start is outside the slow regime.
        StiffnessDetected: if the step controller fails.
    """
    if not t_end > 0:
        raise PreconditionViolated(f"t_end must be positive, got {t_end}")
    evaluator = PressureEvaluator(derived, options, grid)
    table = (PressureTable.from_curve(evaluator, curve, cache_rtol) if curve is not None
             else PressureTable(evaluator, cache_rtol))
    k = derived.g_b_sq / (2.0 * derived.omega_b)

    a0 = initial.A_b
    if a0 > AMPLITUDE_FLOOR:
        gamma0 = gamma_b + k * table(a0).imag / a0
        if abs(gamma0) >= SLOW_REGIME_LIMIT * derived.omega_b:
            raise PreconditionViolated(
                f"|Gamma_tot|={abs(gamma0):.3e} rad/s is not slow against omega_b"
            )

    def rhs(_t, y):
        a = y[0]
        if a <= AMPLITUDE_FLOOR:
            return [-gamma_b * a, 0.0]
        x = table(a)
        return [-gamma_b * a - k * x.imag, -k * x.real / a]

    t_eval = np.linspace(0.0, t_end, samples)
    sol = solve_ivp(rhs, (0.0, t_end), [a0, initial.theta_b], method="RK45", t_eval=t_eval,
                    rtol=rtol, atol=atol, max_step=max_step)
    if sol.status < 0:
        raise StiffnessDetected(f"envelope integration failed: {sol.message}")

    amplitude, theta = sol.y
    theta_dot = np.array([rhs(t, (a, th))[1] for t, a, th in zip(sol.t, amplitude, theta)])
    logger.debug("envelope: A_b %.4g -> %.4g over %.3g s, %d pressure evaluations",
                 a0, amplitude[-1], t_end, table.evaluations)
    return AmplitudeTrajectory(t=sol.t, A_b=amplitude, theta_b=theta, theta_dot=theta_dot,
                               gamma_b=gamma_b, evaluations=table.evaluations)
