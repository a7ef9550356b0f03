"""
Frequency grids and trapezoid quadrature.

Grids are symmetric about zero, include omega = 0, and are piecewise
uniform: a coarse spacing everywhere plus a fine spacing inside refinement
windows placed on the filter resonances and on the sideband ladder of the
working-body resonance.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..circuit import effective_frequency
from ..errors import PreconditionViolated
from ..models import DerivedParameters, SolverOptions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered angular frequencies (rad/s) with trapezoid weights."""

    points: np.ndarray
    weights: np.ndarray = field(repr=False)
    kind: str = "uniform"  # "uniform" or "refined"
    base_step: float = 0.0
    fine_step: Optional[float] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def omega_max(self) -> float:
        return float(self.points[-1])

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.points, -self.points[::-1], rtol=0.0,
                                atol=1e-12 * self.omega_max))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Trapezoid integral along the last axis: sum_k w_k values[..., k]."""
        return np.asarray(values) @ self.weights

    def mirror_index(self) -> np.ndarray:
        """Index map k -> k' with points[k'] = -points[k] (symmetric grids only)."""
        if not self.is_symmetric:
            raise PreconditionViolated("mirror_index requires a symmetric grid")
        return np.arange(len(self.points))[::-1]


def _trapezoid_weights(points: np.ndarray) -> np.ndarray:
    dx = np.diff(points)
    w = np.zeros_like(points)
    w[:-1] += dx / 2.0
    w[1:] += dx / 2.0
    return w


def _from_positive_half(positive: np.ndarray, kind: str, base_step: float,
                        fine_step: Optional[float]) -> FrequencyGrid:
    """Mirror a grid of strictly positive nodes about zero and add omega = 0."""
    points = np.concatenate([-positive[::-1], [0.0], positive])
    if np.any(np.diff(points) <= 0):
        raise PreconditionViolated("grid points must be strictly increasing")
    return FrequencyGrid(points=points, weights=_trapezoid_weights(points), kind=kind,
                         base_step=base_step, fine_step=fine_step)


def uniform_grid(omega_max: float, step: float) -> FrequencyGrid:
    """Symmetric uniform grid on [-omega_max, omega_max] with spacing close to `step`."""
    if not (omega_max > 0 and step > 0):
        raise PreconditionViolated("omega_max and step must be positive")
    n = max(1, int(math.ceil(omega_max / step)))
    positive = np.linspace(0.0, omega_max, n + 1)[1:]
    return _from_positive_half(positive, "uniform", omega_max / n, None)


def _merge(intervals: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def refinement_windows(derived: DerivedParameters,
                       options: SolverOptions) -> List[Tuple[float, float]]:
    """Positive-axis refinement intervals, merged and clipped to (0, omega_max]."""
    omega_max = options.omega_max_factor * derived.omega_s
    half = 0.5 * options.refine_width_gammas
    centres = [(derived.omega_h, half * derived.gamma_h),
               (derived.omega_c, half * derived.gamma_c)]
    omega_eff = effective_frequency(derived, 0.0)
    gamma_wide = half * max(derived.gamma_h, derived.gamma_c)
    for n in range(-options.refine_sidebands, options.refine_sidebands + 1):
        centres.append((omega_eff + n * derived.omega_b, gamma_wide))

    intervals = []
    for centre, width in centres:
        lo, hi = max(centre - width, 0.0), min(centre + width, omega_max)
        if hi > lo:
            intervals.append((lo, hi))
    return _merge(intervals)


def build_grid(derived: DerivedParameters,
               options: Optional[SolverOptions] = None) -> FrequencyGrid:
    """Piecewise-uniform symmetric grid for the frequency-domain pipeline.

    Coarse spacing omega_b / base_divisions on [-omega_max, omega_max],
    omega_max = omega_max_factor * omega_s; fine spacing
    omega_b / fine_divisions inside the refinement windows.
    """
    options = options or SolverOptions()
    omega_max = options.omega_max_factor * derived.omega_s
    coarse = derived.omega_b / options.base_divisions
    fine = derived.omega_b / options.fine_divisions

    windows = refinement_windows(derived, options)
    segments: List[Tuple[float, float, float]] = []
    cursor = 0.0
    for lo, hi in windows:
        if lo > cursor:
            segments.append((cursor, lo, coarse))
        segments.append((max(lo, cursor), hi, fine))
        cursor = hi
    if cursor < omega_max:
        segments.append((cursor, omega_max, coarse))

    pieces = []
    for lo, hi, step in segments:
        if hi <= lo:
            continue
        n = max(1, int(math.ceil((hi - lo) / step)))
        pieces.append(np.linspace(lo, hi, n + 1)[1:])
    positive = np.concatenate(pieces)

    grid = _from_positive_half(positive, "refined", coarse, fine)
    logger.debug("frequency grid: %d points, omega_max = %.4g rad/s, %d windows",
                 len(grid), omega_max, len(windows))
    return grid
