"""
Gaussian bath noise with a prescribed spectrum.

White Gaussian samples are shaped in the frequency domain by sqrt(S/dt)
and transformed back, giving a real stationary sequence whose two-sided
PSD is S(omega) up to the Nyquist frequency pi/dt. Samples are in the
dimensionless units of the field equations.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.signal import welch

from ..constants import FILTERS, ORACLE_STEPS_PER_PERIOD
from ..errors import PreconditionViolated
from ..models import DerivedParameters
from ..spectral import bath_psd

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseTrace:
    """Sampled bath noise of one filter."""

    filter: str
    dt: float
    samples: np.ndarray = field(repr=False)
    seed: int
    psd_model: str

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def psd(self, nperseg: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Welch estimate of the two-sided PSD on omega >= 0."""
        return welch_psd(self.samples, self.dt, nperseg)


def max_step(derived: DerivedParameters) -> float:
    """Largest time step resolving the fastest dynamics."""
    return 2.0 * math.pi / (ORACLE_STEPS_PER_PERIOD * derived.omega_s)


def welch_psd(samples: np.ndarray, dt: float,
              nperseg: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Welch periodogram as (omega, S) with <x^2> = (1/2pi) int S domega.

    Works along the first axis; returns only omega >= 0.
    """
    x = np.asarray(samples, dtype=float)
    nperseg = nperseg or min(4096, x.shape[0])
    f, p = welch(x, fs=1.0 / dt, nperseg=nperseg, return_onesided=False,
                 scaling="density", axis=0, detrend=False)
    keep = f >= 0
    order = np.argsort(f[keep])
    return 2.0 * math.pi * f[keep][order], p[keep][order]


def synthesize_noise(derived: DerivedParameters, f: str, dt: float, n_samples: int,
                     seed: int, model: str = "quantum") -> NoiseTrace:
    """Gaussian noise trace of filter `f` with PSD S_f, deterministic given `seed`.

    Raises:
        PreconditionViolated: if dt is too coarse, n_samples is not a power
            of two, or f is not a filter.
    """
    if f not in FILTERS:
        raise PreconditionViolated(f"unknown filter '{f}'")
    if not 0 < dt <= max_step(derived) * (1 + 1e-12):
        raise PreconditionViolated(f"dt={dt:.3e} s exceeds {max_step(derived):.3e} s")
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise PreconditionViolated(f"n_samples must be a power of two, got {n_samples}")

    rng = np.random.default_rng((seed, FILTERS.index(f)))
    white = rng.standard_normal(n_samples)
    omega = 2.0 * math.pi * np.fft.rfftfreq(n_samples, dt)
    psd = bath_psd(derived, f, omega, model) * derived.psd_scale
    shaped = np.fft.irfft(np.fft.rfft(white) * np.sqrt(psd / dt), n=n_samples)
    return NoiseTrace(filter=f, dt=dt, samples=shaped, seed=seed, psd_model=model)
