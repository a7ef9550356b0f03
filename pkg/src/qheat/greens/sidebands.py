"""
Sideband expansion of the driven Green's function.

With the slow mode oscillating as phi_b(t) = A_b exp(-i theta_b - i omega_b t) + c.c.,
the response of the fast field to forcing at omega is spread over the ladder
omega + n omega_b. The coefficients satisfy, for every n,

    P(omega + n omega_b) G_n + R* G_{n-1} + R G_{n+1} = delta_{n0}

with P = omega_s^2 - K and R = -2 g_s^2 A_b exp(i theta_b). The ladder is
truncated at |n| <= n_max and solved per frequency as a tridiagonal system.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..circuit import effective_frequency
from ..constants import N_MAX_CAP, N_MAX_FLOOR, SOLVE_CHUNK, TAIL_LIMIT
from ..errors import NoTailDecay, PreconditionViolated
from ..models import DerivedParameters, DriveState
from ..spectral import FrequencyGrid, memory_kernel
from .banded import BandedSolution, solve_tridiagonal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TridiagonalSystem:
    """Truncated sideband system for a batch of frequencies."""

    orders: np.ndarray  # n = -n_max .. n_max
    diag: np.ndarray  # (K, 2 n_max + 1)
    sub: complex
    sup: complex
    rhs: np.ndarray  # unit vector at n = 0 per frequency


@dataclass(frozen=True)
class SidebandGreens:
    """Coefficient table G_n(omega_k) for one drive state."""

    n_max: int
    grid: FrequencyGrid
    coefficients: np.ndarray = field(repr=False)  # (K, 2 n_max + 1)
    drive: DriveState
    residual_norm: float
    tail_ratio: float = 0.0
    fallback: int = 0

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def coefficient(self, n: int) -> np.ndarray:
        """G_n on the grid; zero outside the truncation."""
        if abs(n) > self.n_max:
            return np.zeros(len(self.grid), dtype=complex)
        return self.coefficients[:, n + self.n_max]


def coupling(derived: DerivedParameters, drive: DriveState) -> complex:
    """Off-diagonal coupling R = -2 g_s^2 A_b exp(i theta_b)."""
    return -2.0 * derived.g_s_sq * drive.A_b * complex(math.cos(drive.theta_b),
                                                       math.sin(drive.theta_b))


def build_diagonals(derived: DerivedParameters, drive: DriveState, omega,
                    n_max: int) -> TridiagonalSystem:
    """Assemble the truncated system at one or many frequencies.

    Raises:
        PreconditionViolated: if n_max < 1.
        PoleEncountered: propagated from the memory kernel.
    """
    if n_max < 1:
        raise PreconditionViolated(f"n_max must be >= 1, got {n_max}")
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    orders = np.arange(-n_max, n_max + 1)
    shifted = w[:, None] + orders[None, :] * derived.omega_b
    diag = derived.omega_s ** 2 - memory_kernel(derived, shifted)
    rhs = np.zeros_like(diag)
    rhs[:, n_max] = 1.0
    r = coupling(derived, drive)
    return TridiagonalSystem(orders=orders, diag=diag, sub=r.conjugate(), sup=r, rhs=rhs)


def tail_ratio(coefficients: np.ndarray) -> float:
    """max |G_{+-n_max}| / max |G_n| over a coefficient table."""
    magnitude = np.abs(coefficients)
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return 0.0
    return float(max(np.max(magnitude[:, 0]), np.max(magnitude[:, -1]))) / peak


def _solve_chunk(derived: DerivedParameters, drive: DriveState, omega: np.ndarray,
                 n_max: int) -> BandedSolution:
    system = build_diagonals(derived, drive, omega, n_max)
    return solve_tridiagonal(system.diag, system.sub, system.sup, system.rhs)


def solve_at(derived: DerivedParameters, drive: DriveState, omega,
             n_max: int) -> np.ndarray:
    """Coefficients G_n at arbitrary frequencies, shape (len(omega), 2 n_max + 1)."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    return _solve_chunk(derived, drive, w, n_max).x


def default_probes(derived: DerivedParameters) -> List[float]:
    """Probe frequencies +-omega_a'(0), +-omega_h, +-omega_c."""
    centres = [effective_frequency(derived, 0.0), derived.omega_h, derived.omega_c]
    return [s * c for c in centres for s in (1.0, -1.0)]


def auto_truncate(derived: DerivedParameters, drive: DriveState,
                  probe_omegas: Optional[Sequence[float]] = None,
                  floor: int = N_MAX_FLOOR, cap: int = N_MAX_CAP) -> int:
    """Smallest n_max, doubling from `floor`, meeting the tail-decay limit at all probes.

    Raises:
        PreconditionViolated: if the probe set is empty.
        NoTailDecay: if the cap is reached without decay.
    """
    probes = default_probes(derived) if probe_omegas is None else list(probe_omegas)
    if not probes:
        raise PreconditionViolated("auto_truncate needs at least one probe frequency")

    n_max = floor
    while True:
        ratio = tail_ratio(solve_at(derived, drive, probes, n_max))
        if ratio < TAIL_LIMIT:
            logger.debug("auto_truncate: A_b=%.4g -> n_max=%d (tail %.2e)",
                         drive.A_b, n_max, ratio)
            return n_max
        if n_max >= cap:
            raise NoTailDecay(
                f"sideband tail {ratio:.2e} at n_max={n_max} (cap) for A_b={drive.A_b:.4g}"
            )
        n_max = min(2 * n_max, cap)


def solve_sidebands(derived: DerivedParameters, drive: DriveState, grid: FrequencyGrid,
                    n_max: Optional[int] = None, workers: int = 1,
                    chunk: int = SOLVE_CHUNK) -> SidebandGreens:
    """Solve the sideband ladder at every grid frequency.

    Args:
        derived: Derived circuit parameters.
        drive: Slow-mode amplitude and phase.
        grid: Frequency grid.
        n_max: Truncation order; None selects it with `auto_truncate`.
        workers: Threads used over frequency chunks.
        chunk: Frequencies per vectorised batch.

    Raises:
        IllConditioned: if a system cannot be solved to the residual limit.
        NoTailDecay: if the coefficients at +-n_max are not negligible.
    """
    if n_max is None:
        n_max = auto_truncate(derived, drive)
    start = time.perf_counter()
    w = grid.points
    bounds = [(i, min(i + chunk, len(w))) for i in range(0, len(w), chunk)]

    def run(bound):
        lo, hi = bound
        return _solve_chunk(derived, drive, w[lo:hi], n_max)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]

    coefficients = np.concatenate([p.x for p in parts], axis=0)
    residual = max(float(np.max(p.residual)) for p in parts)
    fallback = sum(p.fallback for p in parts)
    if fallback:
        logger.warning("banded LU fallback used at %d of %d frequencies (A_b=%.4g)",
                       fallback, len(w), drive.A_b)

    ratio = tail_ratio(coefficients)
    if ratio >= TAIL_LIMIT:
        raise NoTailDecay(f"sideband tail {ratio:.2e} at n_max={n_max} for A_b={drive.A_b:.4g}")

    logger.debug("sidebands: %d frequencies, n_max=%d, residual %.2e, %.2fs",
                 len(w), n_max, residual, time.perf_counter() - start)
    return SidebandGreens(n_max=n_max, grid=grid, coefficients=coefficients, drive=drive,
                          residual_norm=residual, tail_ratio=ratio, fallback=fallback)


def sideband_correlation(greens: SidebandGreens, p: int) -> np.ndarray:
    """Sum over n of G_n G*_{n-p} at every grid frequency."""
    g = greens.coefficients
    m = g.shape[1]
    if abs(p) >= m:
        return np.zeros(g.shape[0], dtype=complex)
    if p >= 0:
        return np.sum(g[:, p:] * np.conj(g[:, :m - p]), axis=1)
    return np.sum(g[:, :m + p] * np.conj(g[:, -p:]), axis=1)
