"""
Total dissipation of the slow mode and its stationary points.

    Gamma_tot(A_b) = gamma_b + g_b^2 Im X(A_b) / (2 A_b omega_b)

where X is the gauge-free noise pressure. Zeros of Gamma_tot are stationary
amplitudes; a positive slope makes them stable.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..constants import (
    AMPLITUDE_MAX,
    AMPLITUDE_MIN,
    AMPLITUDE_POINTS,
    GAMMA_REF_DIVISOR,
    STATIONARY_RTOL,
)
from ..errors import PreconditionViolated
from ..models import DerivedParameters, SolverOptions
from ..spectral import FrequencyGrid
from .pressure import PressureEvaluator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StationaryPoint:
    A_b: float
    kind: str  # "stable" or "unstable"
    slope: float


@dataclass(frozen=True)
class DissipationCurve:
    """Gamma_tot sampled over amplitudes, with classified stationary points."""

    amplitudes: np.ndarray
    gamma_tot: np.ndarray
    noise_pressure: np.ndarray = field(repr=False)
    stationary_points: List[StationaryPoint]
    gamma_b: float
    omega_b: float
    model: str = "quantum"
    dc_shift: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def pressure_rate(self) -> np.ndarray:
        """Gamma_tot - gamma_b: the noise-pressure contribution alone."""
        return self.gamma_tot - self.gamma_b

    def primary_valley(self) -> Optional[Tuple[int, int]]:
        """Index range [start, stop) of the lowest-amplitude run with pressure_rate < 0."""
        negative = np.flatnonzero(self.pressure_rate < 0)
        if negative.size == 0:
            return None
        start = int(negative[0])
        stop = start
        while stop < len(self.amplitudes) and self.pressure_rate[stop] < 0:
            stop += 1
        return start, stop

    def stable(self) -> List[StationaryPoint]:
        return [p for p in self.stationary_points if p.kind == "stable"]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({
            "A_b": self.amplitudes,
            "gamma_tot": self.gamma_tot,
            "re_pressure": self.noise_pressure.real,
            "im_pressure": self.noise_pressure.imag,
        })
        if self.dc_shift is not None:
            frame["dc_shift"] = self.dc_shift
        return frame

    def summary(self) -> dict:
        return {
            "gamma_b": self.gamma_b,
            "model": self.model,
            "points": len(self.amplitudes),
            "stationary_points": [
                {"A_b": p.A_b, "kind": p.kind, "slope": p.slope} for p in self.stationary_points
            ],
        }


def amplitude_grid(points: int = AMPLITUDE_POINTS, a_max: float = AMPLITUDE_MAX,
                   a_min: float = AMPLITUDE_MIN) -> np.ndarray:
    """Logarithmically spaced amplitudes on [a_min, a_max], dense near zero."""
    if not (0 < a_min < a_max) or points < 2:
        raise PreconditionViolated("amplitude grid needs 0 < a_min < a_max and >= 2 points")
    return np.geomspace(a_min, a_max, points)


def _rate(derived: DerivedParameters, A_b: float, pressure: complex) -> float:
    return derived.g_b_sq * pressure.imag / (2.0 * A_b * derived.omega_b)


def total_dissipation(derived: DerivedParameters, A_b: float, gamma_b: float,
                      options: Optional[SolverOptions] = None,
                      evaluator: Optional[PressureEvaluator] = None) -> float:
    """Gamma_tot at one amplitude (rad/s).

    Raises:
        PreconditionViolated: if A_b <= 0.
    """
    if not A_b > 0:
        raise PreconditionViolated(f"total_dissipation needs A_b > 0, got {A_b}")
    if derived.g_b_sq == 0:
        return gamma_b
    evaluator = evaluator or PressureEvaluator(derived, options)
    return gamma_b + _rate(derived, A_b, evaluator.pressure(A_b))


def _refine_root(derived, evaluator, gamma_b, lo, hi, threshold) -> Optional[float]:
    """Brent root of Gamma_tot in [lo, hi], or None if |Gamma_tot| there is not small.

    A sign change across a jump (a pole of the pressure, or a grid artefact)
    converges onto the jump itself; such crossings are not stationary points.
    """
    def f(a):
        return total_dissipation(derived, a, gamma_b, evaluator=evaluator)

    root = brentq(f, lo, hi, xtol=1e-14 * hi, rtol=1e-12, maxiter=100)
    residual = abs(f(root))
    if residual >= threshold:
        logger.warning("dropping sign change at A_b=%.6g: |Gamma_tot|=%.3e above %.3e",
                       root, residual, threshold)
        return None
    return root


def dissipation_curve(derived: DerivedParameters, amplitudes: Optional[Sequence[float]] = None,
                      gamma_b: float = 0.0, options: Optional[SolverOptions] = None,
                      grid: Optional[FrequencyGrid] = None,
                      evaluator: Optional[PressureEvaluator] = None) -> DissipationCurve:
    """Sample Gamma_tot over `amplitudes` and locate its zeros.

    Sign changes between neighbouring samples are refined with Brent's method;
    each root is classified by a central-difference slope with a step of one
    eighth of the local amplitude spacing.
    """
    options = options or SolverOptions()
    amps = amplitude_grid() if amplitudes is None else np.asarray(amplitudes, dtype=float)
    if amps.size < 2 or np.any(amps <= 0) or np.any(np.diff(amps) <= 0):
        raise PreconditionViolated("amplitudes must be positive and strictly increasing")
    evaluator = evaluator or PressureEvaluator(derived, options, grid)
    start = time.perf_counter()

    def one(a: float):
        h = evaluator.harmonics_at(a)
        return h.pressure, h.dc_shift

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as executor:
            results = list(executor.map(one, amps))
    else:
        results = [one(a) for a in amps]

    pressure = np.array([r[0] for r in results], dtype=complex)
    dc_shift = np.array([r[1] for r in results])
    gamma = gamma_b + derived.g_b_sq * pressure.imag / (2.0 * amps * derived.omega_b)

    threshold = STATIONARY_RTOL * derived.omega_b / GAMMA_REF_DIVISOR
    points: List[StationaryPoint] = []
    for i in range(len(amps) - 1):
        g0, g1 = gamma[i], gamma[i + 1]
        if g0 == 0.0:
            root = float(amps[i])
        elif g0 * g1 < 0:
            root = _refine_root(derived, evaluator, gamma_b, amps[i], amps[i + 1], threshold)
            if root is None:
                continue
        else:
            continue
        step = (amps[i + 1] - amps[i]) / 8.0
        lo = max(root - step, 0.5 * root)
        g_hi = total_dissipation(derived, root + step, gamma_b, evaluator=evaluator)
        g_lo = total_dissipation(derived, lo, gamma_b, evaluator=evaluator)
        slope = (g_hi - g_lo) / (root + step - lo)
        kind = "stable" if slope > 0 else "unstable"
        if kind != ("stable" if g1 > g0 else "unstable"):
            logger.warning("slope classification at A_b=%.6g disagrees with the sampled secant",
                           root)
        points.append(StationaryPoint(A_b=float(root), kind=kind, slope=float(slope)))

    logger.debug("dissipation curve: %d amplitudes, %d stationary points, %.1fs",
                 len(amps), len(points), time.perf_counter() - start)
    return DissipationCurve(amplitudes=amps, gamma_tot=gamma, noise_pressure=pressure,
                            stationary_points=points, gamma_b=gamma_b,
                            omega_b=derived.omega_b, model=evaluator.options.model,
                            dc_shift=dc_shift)


def q_thresholds(derived: DerivedParameters, curve: DissipationCurve) -> Tuple[float, float]:
    """(Q_init, Q_stop) from a gamma_b = 0 curve.

    Q_stop is omega_b over the depth of the primary valley. Q_init uses the
    pressure rate at the smallest sampled amplitude and is infinite when that
    rate is not negative.
    """
    valley = curve.primary_valley()
    if valley is None:
        return math.inf, math.inf
    start, stop = valley
    rate = curve.pressure_rate
    q_stop = derived.omega_b / abs(float(np.min(rate[start:stop])))
    q_init = derived.omega_b / abs(float(rate[0])) if rate[0] < 0 else math.inf
    return q_init, q_stop


@dataclass(frozen=True)
class NullCheck:
    """Minimum of Gamma_tot at gamma_b = 0 over an amplitude probe."""

    model: str
    min_gamma: float
    A_b_at_min: float
    passed: bool


def null_engine_check(derived: DerivedParameters, amplitudes: Sequence[float],
                      options: Optional[SolverOptions] = None) -> NullCheck:
    """Probe for spurious gain, meant for equal bath temperatures.

    Violations are logged and reported, not raised.
    """
    evaluator = PressureEvaluator(derived, options)
    amps = np.asarray(amplitudes, dtype=float)
    gamma = np.array([total_dissipation(derived, a, 0.0, evaluator=evaluator) for a in amps])
    i = int(np.argmin(gamma))
    passed = bool(gamma[i] >= 0)
    if not passed:
        logger.warning("null engine check (%s): Gamma_tot=%.3e at A_b=%.4g with T_h=%g, T_c=%g",
                       evaluator.options.model, gamma[i], amps[i], derived.T_h, derived.T_c)
    return NullCheck(model=evaluator.options.model, min_gamma=float(gamma[i]),
                     A_b_at_min=float(amps[i]), passed=passed)
