"""
Noise pressure on the slow mode.

The noise-averaged square of the fast field is periodic in the slow
oscillation,

    <phi_s^2>(t) = sum_p c_p exp(-i p omega_b t),
    c_p = (1/2pi) int S(omega) sum_n G_n(omega) G*_{n-p}(omega) domega,

and only the first harmonic feeds back on the amplitude and phase of the
slow mode. The reported pressure is exp(i theta_b) c_1, which does not
depend on theta_b.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..constants import QUADRATURE_RTOL
from ..errors import QuadratureNotConverged
from ..greens import SidebandGreens, sideband_correlation, solve_sidebands
from ..models import DerivedParameters, DriveState, SolverOptions
from ..spectral import FrequencyGrid, build_grid, total_psd

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PressureHarmonics:
    """Harmonics c_p, |p| <= p_max, of the noise-averaged <phi_s^2>(t)."""

    drive: DriveState
    p_max: int
    harmonics: np.ndarray = field(repr=False)  # index p + p_max
    dc_shift: float = 0.0  # static slow-mode displacement g_b^2 c_0 / omega_b^2
    n_max: int = 0

    def c(self, p: int) -> complex:
        if abs(p) > self.p_max:
            return 0j
        return complex(self.harmonics[p + self.p_max])

    @property
    def c0(self) -> float:
        return self.c(0).real

    @property
    def pressure(self) -> complex:
        """First harmonic with the phase gauge removed."""
        return complex(math.cos(self.drive.theta_b), math.sin(self.drive.theta_b)) * self.c(1)

    @property
    def tail_ratio(self) -> float:
        """|c_{p_max}| / |c_0|."""
        c0 = abs(self.c(0))
        return abs(self.c(self.p_max)) / c0 if c0 > 0 else 0.0

    def evaluate(self, t, omega_b: float) -> np.ndarray:
        """<phi_s^2>(t) reconstructed from the harmonics (real part)."""
        t = np.asarray(t, dtype=float)
        p = np.arange(-self.p_max, self.p_max + 1)
        phase = np.exp(-1j * np.multiply.outer(t, p) * omega_b)
        return np.real(phase @ self.harmonics)


def pressure_harmonics(derived: DerivedParameters, greens: SidebandGreens, psd: np.ndarray,
                       p_max: int = 1) -> PressureHarmonics:
    """Harmonic coefficients of <phi_s^2> from a solved sideband table.

    Args:
        derived: Derived circuit parameters.
        greens: Sideband coefficients on a grid.
        psd: Dimensionless noise PSD on the same grid.
        p_max: Highest harmonic order.
    """
    c = np.array([greens.grid.integrate(psd * sideband_correlation(greens, p))
                  for p in range(-p_max, p_max + 1)]) / (2.0 * np.pi)
    c0 = float(c[p_max].real)
    return PressureHarmonics(drive=greens.drive, p_max=p_max, harmonics=c,
                             dc_shift=derived.g_b_sq * c0 / derived.omega_b ** 2,
                             n_max=greens.n_max)


class PressureEvaluator:
    """Evaluates the noise pressure for many drive states on one grid.

    The grid and the dimensionless PSD do not depend on the drive and are
    computed once.

    Usage:
        evaluator = PressureEvaluator(derived, options=SolverOptions(model="classical"))
        x = evaluator.pressure(0.2)
    """

    def __init__(self, derived: DerivedParameters, options: Optional[SolverOptions] = None,
                 grid: Optional[FrequencyGrid] = None):
        self.derived = derived
        self.options = options or SolverOptions()
        self.grid = grid if grid is not None else build_grid(derived, self.options)
        self.psd = total_psd(derived, self.grid.points, self.options.model) * derived.psd_scale
        self._refined: Optional["PressureEvaluator"] = None
        logger.debug("pressure evaluator: %s model, %d grid points",
                     self.options.model, len(self.grid))

    def solve(self, drive: DriveState, workers: int = 1) -> SidebandGreens:
        return solve_sidebands(self.derived, drive, self.grid, self.options.n_max,
                               workers=workers)

    def harmonics(self, drive: DriveState, p_max: int = 1,
                  workers: int = 1) -> PressureHarmonics:
        return pressure_harmonics(self.derived, self.solve(drive, workers), self.psd, p_max)

    def harmonics_at(self, A_b: float, theta_b: float = 0.0,
                     workers: int = 1) -> PressureHarmonics:
        """First-order harmonics at amplitude `A_b`, checked against a refined grid.

        Raises:
            QuadratureNotConverged: with `check_convergence`, if the refined
                grid moves the result by more than the quadrature tolerance.
        """
        drive = DriveState(A_b=A_b, theta_b=theta_b)
        result = self.harmonics(drive, workers=workers)
        value = result.pressure
        if self.options.check_convergence and value != 0:
            if self._refined is None:
                self._refined = PressureEvaluator(self.derived, self.options.refined())
            fine = self._refined.harmonics(drive, workers=workers).pressure
            change = abs(fine - value) / abs(fine)
            if change > QUADRATURE_RTOL:
                raise QuadratureNotConverged(
                    f"noise pressure changed by {change:.2e} on the refined grid at A_b={A_b:.4g}"
                )
        return result

    def pressure(self, A_b: float, theta_b: float = 0.0, workers: int = 1) -> complex:
        """Gauge-free noise pressure at amplitude `A_b`."""
        return self.harmonics_at(A_b, theta_b, workers).pressure


def noise_pressure(derived: DerivedParameters, drive: DriveState,
                   grid: Optional[FrequencyGrid] = None, n_max: Optional[int] = None,
                   model: Optional[str] = None,
                   options: Optional[SolverOptions] = None) -> complex:
    """Noise- and time-averaged pressure exp(i theta_b) c_1.

    Raises:
        QuadratureNotConverged: see `PressureEvaluator.pressure`.
    """
    base = options or SolverOptions()
    base = base.model_copy(update={"model": model or base.model, "n_max": n_max or base.n_max})
    return PressureEvaluator(derived, base, grid).pressure(drive.A_b, drive.theta_b)
