"""
Otto-cycle trajectory of the working body over one slow period.

With phi_b(t) = 2 A_b cos(omega_b t), the noise-averaged <phi_s^2>(t) is
rebuilt from its harmonics, the inductive energy of resonator A follows
from it, and n_a = 2 E_ind / (hbar omega_a'(t)) counts the quanta stored in
the nearly harmonic mode. The loop traced in the (omega_a', n_a) plane has
area -oint n_a domega_a'; positive area means the mode produces work.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from ..circuit import effective_frequency
from ..constants import (
    CYCLE_SAMPLES,
    E_CHARGE,
    HARMONIC_CUTOFF,
    HARMONIC_TAIL_LIMIT,
    HBAR,
    POSITIVITY_ATOL,
)
from ..errors import HarmonicTruncation, PreconditionViolated
from ..models import DerivedParameters, DriveState, SolverOptions
from ..slowdyn import PressureEvaluator, PressureHarmonics
from ..spectral import FrequencyGrid

logger = logging.getLogger(__name__)


@dataclass
class CycleTrajectory:
    """One period of the working-body cycle, sampled at both ends of the period."""

    A_b: float
    t: np.ndarray
    phi_b: np.ndarray = field(repr=False)
    phi_s_sq: np.ndarray = field(repr=False)
    omega_a_eff: np.ndarray = field(repr=False)
    n_a: np.ndarray = field(repr=False)
    E_a_ind: np.ndarray = field(repr=False)
    loop_area: float = 0.0  # rad/s
    work_per_cycle: float = 0.0  # J
    mean_power: float = 0.0  # W
    eta_otto: float = 0.0
    harmonics: Optional[PressureHarmonics] = field(default=None, repr=False)

    @property
    def closure_error(self) -> float:
        """Largest relative mismatch between the first and last samples."""
        return max(abs(self.n_a[-1] - self.n_a[0]) / max(abs(self.n_a[0]), 1e-300),
                   abs(self.omega_a_eff[-1] - self.omega_a_eff[0]) / self.omega_a_eff[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "omega_a_eff": self.omega_a_eff, "n_a": self.n_a,
                             "E_a_ind": self.E_a_ind, "phi_s_sq": self.phi_s_sq})

    def summary(self) -> dict:
        return {"A_b": self.A_b, "loop_area": self.loop_area,
                "work_per_cycle": self.work_per_cycle, "mean_power": self.mean_power,
                "eta_otto": self.eta_otto}


def inductive_energy(derived: DerivedParameters, phi_s_sq, phi_b) -> np.ndarray:
    """Energy in the inductive elements of resonator A (J)."""
    shift = derived.g_s_sq / derived.omega_a ** 2 * np.asarray(phi_b, dtype=float)
    ratio = derived.L_a / derived.L_J
    flux_sq = (HBAR / E_CHARGE) ** 2 * np.asarray(phi_s_sq, dtype=float)
    return flux_sq / derived.L_a * (ratio - shift) * (1.0 + 2.0 * ratio - 2.0 * shift)


def loop_area(omega: np.ndarray, n: np.ndarray) -> float:
    """-oint n domega along the sampled closed path (trapezoid rule)."""
    return float(-np.sum(0.5 * (n[1:] + n[:-1]) * np.diff(omega)))


def otto_trajectory(derived: DerivedParameters, A_b: float,
                    samples_per_period: int = CYCLE_SAMPLES,
                    options: Optional[SolverOptions] = None,
                    grid: Optional[FrequencyGrid] = None,
                    evaluator: Optional[PressureEvaluator] = None,
                    p_max: int = HARMONIC_CUTOFF) -> CycleTrajectory:
    """Trajectory of (omega_a', n_a) over one period at amplitude `A_b`.

    Raises:
        PreconditionViolated: if samples_per_period < 4.
        HarmonicTruncation: if |c_p_max| / |c_0| exceeds the tail limit, or the
            reconstructed <phi_s^2> goes negative.
    """
    if samples_per_period < 4:
        raise PreconditionViolated("otto_trajectory needs at least 4 samples per period")
    evaluator = evaluator or PressureEvaluator(derived, options, grid)
    harmonics = evaluator.harmonics(DriveState(A_b=A_b, theta_b=0.0), p_max=p_max)
    if harmonics.tail_ratio > HARMONIC_TAIL_LIMIT:
        raise HarmonicTruncation(
            f"|c_{p_max}|/|c_0| = {harmonics.tail_ratio:.2e} at A_b={A_b:.4g}"
        )

    tau = derived.tau_b
    t = np.linspace(0.0, tau, samples_per_period + 1)
    phi_b = 2.0 * A_b * np.cos(derived.omega_b * t)
    phi_s_sq = harmonics.evaluate(t, derived.omega_b)
    if np.min(phi_s_sq) < -POSITIVITY_ATOL:
        raise HarmonicTruncation(
            f"reconstructed <phi_s^2> dips to {float(np.min(phi_s_sq)):.3e} at A_b={A_b:.4g}"
        )

    omega = np.asarray(effective_frequency(derived, phi_b), dtype=float)
    energy = inductive_energy(derived, phi_s_sq, phi_b)
    n_a = 2.0 * energy / (HBAR * omega)
    area = loop_area(omega, n_a)
    work = HBAR * area
    eta_otto = 1.0 - float(np.min(omega)) / float(np.max(omega))
    logger.debug("cycle A_b=%.4g: area %.4e rad/s, work %.4e J", A_b, area, work)
    return CycleTrajectory(A_b=A_b, t=t, phi_b=phi_b, phi_s_sq=phi_s_sq, omega_a_eff=omega,
                           n_a=n_a, E_a_ind=energy, loop_area=area, work_per_cycle=work,
                           mean_power=work / tau if tau > 0 else math.nan, eta_otto=eta_otto,
                           harmonics=harmonics)
