"""
Frequency-domain building blocks of the reduced model.

Conventions: x(t) = (1/2pi) int x(omega) exp(-i omega t) domega, two-sided
PSDs with <x^2> = (1/2pi) int S domega. Under this convention the bath chain
is passive when Im K(omega) >= 0 and Im G0(omega) >= 0 for omega > 0.

All functions accept scalars or numpy arrays of angular frequency (rad/s).
PSDs are returned in flux units (Wb^2 s^-3); multiply by
`derived.psd_scale` for the dimensionless fields.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy.signal import find_peaks

from ..constants import FILTERS, HBAR, K_B, NOISE_MODELS, POLE_RTOL, PSD_SMALL_ARG
from ..errors import PoleEncountered, PreconditionViolated
from ..models import DerivedParameters
from .grid import FrequencyGrid

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _check_model(model: str) -> None:
    if model not in NOISE_MODELS:
        raise PreconditionViolated(
            f"Unknown noise model '{model}'. Supported: {list(NOISE_MODELS)}")


def filter_response(derived: DerivedParameters, f: str, omega: ArrayLike) -> np.ndarray:
    """Filter response alpha_fa omega^2 / (omega_f^2 - omega^2 - 2 i gamma_f omega)."""
    w = np.asarray(omega, dtype=float)
    theta = derived.omega_f(f) ** 2 - w ** 2 - 2j * derived.gamma_f(f) * w
    return derived.alpha_fa(f) * w ** 2 / theta


def kernel_denominator(derived: DerivedParameters, omega: ArrayLike) -> np.ndarray:
    """omega_a^2 - omega^2 [1 + sum_f alpha_f p_f(omega)]."""
    w = np.asarray(omega, dtype=float)
    coupling = sum(derived.alpha_f(f) * filter_response(derived, f, w) for f in FILTERS)
    den = derived.omega_a ** 2 - w ** 2 * (1.0 + coupling)
    small = np.abs(den) <= POLE_RTOL * derived.omega_a ** 2
    if np.any(small):
        where = float(np.atleast_1d(w)[np.argmax(np.atleast_1d(small))])
        raise PoleEncountered(f"memory kernel pole at omega = {where:.6e} rad/s", omega=where)
    return den


def memory_kernel(derived: DerivedParameters, omega: ArrayLike) -> np.ndarray:
    """Memory kernel K(omega) = omega_a^4 / (omega_a^2 - omega^2 [1 + sum alpha_f p_f]).

    Raises:
        PoleEncountered: if the denominator vanishes (only possible with gamma_f = 0).
    """
    den = kernel_denominator(derived, omega)
    return derived.omega_a ** 2 * (derived.omega_a ** 2 / den)


def bath_psd(derived: DerivedParameters, f: str, omega: ArrayLike,
             model: str = "quantum") -> np.ndarray:
    """Thermal noise PSD of filter `f`.

    quantum:   4 hbar omega gamma_f^2 R_f coth(hbar omega / 2 k_B T_f)
    classical: 8 gamma_f^2 R_f k_B T_f
    """
    _check_model(model)
    w = np.asarray(omega, dtype=float)
    temperature = derived.T_f(f)
    if not temperature > 0:
        raise PreconditionViolated(f"T_{f} must be positive, got {temperature}")
    classical = 8.0 * derived.gamma_f(f) ** 2 * derived.R_f(f) * K_B * temperature
    if model == "classical":
        return np.full_like(w, classical)

    # S = classical * x coth(x), x = hbar omega / (2 k_B T); x coth x -> 1 at x -> 0
    x = np.abs(HBAR * w / (2.0 * K_B * temperature))
    tiny = x < PSD_SMALL_ARG
    safe = np.where(tiny, 1.0, x)
    x_coth = np.where(tiny, 1.0, safe / np.tanh(safe))
    return classical * x_coth


def total_psd(derived: DerivedParameters, omega: ArrayLike, model: str = "quantum") -> np.ndarray:
    """Noise PSD acting on the SQUID field, in flux units.

    S = omega_a^4 sum_f |p_f|^2 S_f / |omega_a^2 - omega^2 (1 + sum alpha_f p_f)|^2
    """
    w = np.asarray(omega, dtype=float)
    den = kernel_denominator(derived, w)
    numerator = sum(np.abs(filter_response(derived, f, w)) ** 2 * bath_psd(derived, f, w, model)
                    for f in FILTERS)
    return derived.omega_a ** 4 * numerator / np.abs(den) ** 2


def static_greens(derived: DerivedParameters, phi_b: float, omega: ArrayLike) -> np.ndarray:
    """Time-independent Green's function G0 = 1 / (omega_s^2 - 2 g_s^2 phi_b - K)."""
    stiffness = derived.omega_s ** 2 - 2.0 * derived.g_s_sq * phi_b
    return 1.0 / (stiffness - memory_kernel(derived, omega))


def resonance_peaks(omega: np.ndarray, greens: np.ndarray, min_height: float = 0.0) -> List[float]:
    """Frequencies of the local maxima of |Im G0| on omega > 0, strongest first."""
    omega = np.asarray(omega, dtype=float)
    mask = omega > 0
    profile = np.abs(np.imag(np.asarray(greens)[mask]))
    idx, props = find_peaks(profile, height=min_height)
    order = np.argsort(props["peak_heights"])[::-1]
    return [float(omega[mask][i]) for i in idx[order]]


@dataclass(frozen=True)
class SpectralTables:
    """Spectral functions tabulated on a grid (PSDs in flux units)."""

    grid: FrequencyGrid
    model: str
    kernel: np.ndarray = field(repr=False)
    total_psd: np.ndarray = field(repr=False)
    psd: Dict[str, np.ndarray] = field(repr=False)
    responses: Dict[str, np.ndarray] = field(repr=False)

    def columns(self, derived: DerivedParameters, phi_b: float = 0.0) -> Dict[str, np.ndarray]:
        """Plot-ready columns including G0 at `phi_b`."""
        g0 = 1.0 / (derived.omega_s ** 2 - 2.0 * derived.g_s_sq * phi_b - self.kernel)
        return {
            "omega_rad_s": self.grid.points,
            "re_K": self.kernel.real,
            "im_K": self.kernel.imag,
            "S_total": self.total_psd,
            "S_h": self.psd["h"],
            "S_c": self.psd["c"],
            "re_G0": g0.real,
            "im_G0": g0.imag,
        }


def spectral_tables(derived: DerivedParameters, grid: FrequencyGrid,
                    model: str = "quantum") -> SpectralTables:
    """Tabulate K, S, S_f and p_f on `grid`."""
    w = grid.points
    return SpectralTables(
        grid=grid,
        model=model,
        kernel=memory_kernel(derived, w),
        total_psd=total_psd(derived, w, model),
        psd={f: bath_psd(derived, f, w, model) for f in FILTERS},
        responses={f: filter_response(derived, f, w) for f in FILTERS},
    )


def passivity_margin(derived: DerivedParameters, omega: np.ndarray) -> Tuple[float, float]:
    """Minimum of Im K and of Im G0 (phi_b = 0) over omega > 0; both >= 0 when passive."""
    w = np.asarray(omega, dtype=float)
    w = w[w > 0]
    return (float(np.min(memory_kernel(derived, w).imag)),
            float(np.min(static_greens(derived, 0.0, w).imag)))
