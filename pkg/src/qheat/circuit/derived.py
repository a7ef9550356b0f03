"""
Derived parameters of the reduced two-field model.

Turns the elementary circuit values into the effective quantities used by
every downstream module: Josephson inductance and optomechanical coupling at
the static flux point, resonator frequencies, capacitive coupling ratios,
nonlinear coupling constants and filter resistances.
"""

import logging
import math
from typing import Union

import numpy as np

from ..constants import FILTERS, PHI0
from ..errors import PreconditionViolated, SingularOperatingPoint
from ..models import CircuitParameters, DerivedParameters
from .flux import solve_flux_minimum

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _sqrt_positive(name: str, radicand: float) -> float:
    if not radicand > 0:
        raise PreconditionViolated(f"{name}: non-real frequency (radicand {radicand:.3e})")
    return math.sqrt(radicand)


def derive_parameters(params: CircuitParameters) -> DerivedParameters:
    """Compute every effective parameter from the elementary ones.

    Raises:
        PreconditionViolated: if the flux solve is not admissible, the junction
            inductance is not positive, or a derived frequency is non-real.
    """
    phi_g0 = solve_flux_minimum(params)
    arg = math.pi * phi_g0 / PHI0

    inv_L_J = 4.0 * params.I_c * math.pi / PHI0 * math.cos(arg)
    if not inv_L_J > 0:
        raise PreconditionViolated(
            f"Josephson inductance is not positive at phi_g0 = {phi_g0 / PHI0:.4f} Phi0"
        )
    L_J = 1.0 / inv_L_J
    g0_sq = 4.0 * params.I_c * math.pi ** 2 / PHI0 ** 2 * math.sin(arg)

    C_Sigma_a = params.C_a + params.C_ha + params.C_ca
    C_Sigma = {f: params.C_Sigma_f(f) for f in FILTERS}

    omega_a = _sqrt_positive("omega_a", 1.0 / (C_Sigma_a * params.L_a))
    omega_f = {f: _sqrt_positive(f"omega_{f}", 1.0 / (C_Sigma[f] * params.L_f(f)))
               for f in FILTERS}
    omega_s = _sqrt_positive("omega_s", (1.0 + 2.0 * params.L_a / L_J) * omega_a ** 2)

    N_L = 1.0 / (1.0 + params.L_b / params.L_g + params.L_b / L_J)
    omega_b = _sqrt_positive("omega_b", (1.0 - N_L) / (params.L_b * params.C_b))

    g_s_sq = PHI0 * N_L * g0_sq / (math.pi * C_Sigma_a)
    g_b_sq = PHI0 * N_L * g0_sq / (math.pi * params.C_b)

    gamma = {f: params.gamma_f(f) for f in FILTERS}
    R = {f: 1.0 / (2.0 * gamma[f] * C_Sigma[f]) for f in FILTERS}

    derived = DerivedParameters(
        phi_g0=phi_g0,
        L_J=L_J,
        g0_sq=g0_sq,
        L_a=params.L_a,
        L_b=params.L_b,
        C_Sigma_a=C_Sigma_a,
        C_Sigma_h=C_Sigma["h"],
        C_Sigma_c=C_Sigma["c"],
        omega_a=omega_a,
        omega_h=omega_f["h"],
        omega_c=omega_f["c"],
        omega_s=omega_s,
        omega_b=omega_b,
        N_L=N_L,
        alpha_ha=params.C_ha / C_Sigma_a,
        alpha_ca=params.C_ca / C_Sigma_a,
        alpha_h=params.C_ha / C_Sigma["h"],
        alpha_c=params.C_ca / C_Sigma["c"],
        g_s_sq=g_s_sq,
        g_b_sq=g_b_sq,
        gamma_h=gamma["h"],
        gamma_c=gamma["c"],
        R_h=R["h"],
        R_c=R["c"],
        T_h=params.T_h,
        T_c=params.T_c,
        tau_b=2.0 * math.pi / omega_b,
    )

    if not (omega_b < omega_f["c"] and omega_b < omega_f["h"]):
        logger.warning(
            "omega_b/2pi = %.3g Hz is not below the filter frequencies; "
            "the slow-mode reduction assumes omega_b << omega_c",
            omega_b / (2 * math.pi),
        )
    logger.debug(
        "derived: L_J=%.4g H, N_L=%.4g, f_a=%.4g Hz, f_s=%.4g Hz, f_b=%.4g Hz",
        L_J, N_L, omega_a / (2 * math.pi), omega_s / (2 * math.pi), omega_b / (2 * math.pi),
    )
    return derived


def effective_frequency(derived: DerivedParameters, phi_b: ArrayLike) -> ArrayLike:
    """Normal-mode frequency omega_a'(phi_b) of resonator A with the SQUID termination.

    omega_a' = 1 / sqrt(C_Sigma_a [L_a + L_J / (2 - 2 g_s^2 L_J C_Sigma_a phi_b)])

    Args:
        derived: Derived parameters.
        phi_b: Dimensionless slow-mode flux, scalar or array.

    Raises:
        SingularOperatingPoint: if the bias makes the SQUID or total
            inductance non-positive anywhere in `phi_b`.
    """
    phi = np.asarray(phi_b, dtype=float)
    squid = 2.0 - 2.0 * derived.g_s_sq * derived.L_J * derived.C_Sigma_a * phi
    if np.any(squid <= 0):
        raise SingularOperatingPoint(
            f"SQUID radicand crosses zero for phi_b up to {np.max(phi):.4g}"
        )
    inductance = derived.L_a + derived.L_J / squid
    if np.any(inductance <= 0):
        raise SingularOperatingPoint("total effective inductance is not positive")
    omega = 1.0 / np.sqrt(derived.C_Sigma_a * inductance)
    return float(omega) if np.ndim(omega) == 0 else omega
