"""
Static flux solution of the SQUID loop.

The loop flux minimises the potential of the geometric inductance L_g in
series with the two junctions:

    (phi - Phi_ext) / L_g + 2 I_c sin(pi phi / Phi0) = 0

In units of Phi0 this is x = x_ext - beta sin(pi x) with
beta = 2 I_c L_g / Phi0. The left-hand side is strictly increasing when
pi beta < 1, i.e. I_c L_g < Phi0 / (2 pi), and the root then lies inside
[x_ext - beta, x_ext + beta].
"""

import logging
import math

from scipy.optimize import brentq

from ..constants import FLUX_MAX_NEWTON, FLUX_TOL, PHI0
from ..errors import NoConvergence, PreconditionViolated
from ..models import CircuitParameters

logger = logging.getLogger(__name__)


def flux_residual(params: CircuitParameters, phi: float) -> float:
    """Current balance of the loop at flux `phi` (amperes)."""
    return (phi - params.Phi_ext) / params.L_g + 2.0 * params.I_c * math.sin(math.pi * phi / PHI0)


def solve_flux_minimum(params: CircuitParameters, tol: float = FLUX_TOL) -> float:
    """Solve the transcendental flux-minimum equation.

    Args:
        params: Circuit parameters.
        tol: Relative residual tolerance, measured against
            max(|Phi_ext|, Phi0) / L_g.

    Returns:
        phi_g0 in webers.

    Raises:
        PreconditionViolated: if tol <= 0 or I_c L_g >= Phi0 / (2 pi).
        NoConvergence: if the bracketed solve or the Newton polish fails.
    """
    if not tol > 0:
        raise PreconditionViolated(f"tol must be positive, got {tol}")
    if params.I_c * params.L_g >= PHI0 / (2.0 * math.pi):
        raise PreconditionViolated(
            f"I_c*L_g = {params.I_c * params.L_g:.3e} Wb violates the single-solution "
            f"condition I_c*L_g < Phi0/(2 pi) = {PHI0 / (2 * math.pi):.3e} Wb"
        )

    x_ext = params.Phi_ext / PHI0
    beta = 2.0 * params.I_c * params.L_g / PHI0
    if beta == 0.0:
        return params.Phi_ext

    def f(x: float) -> float:
        return x - x_ext + beta * math.sin(math.pi * x)

    def df(x: float) -> float:
        return 1.0 + math.pi * beta * math.cos(math.pi * x)

    if f(x_ext) == 0.0:
        return params.Phi_ext

    lo, hi = x_ext - beta, x_ext + beta
    try:
        x = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    except (ValueError, RuntimeError) as e:
        raise NoConvergence(f"flux bracket [{lo}, {hi}] failed: {e}") from e

    # Newton polish; f' >= 1 - pi*beta > 0 under the precondition.
    for _ in range(FLUX_MAX_NEWTON):
        step = f(x) / df(x)
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break

    phi = x * PHI0
    scale = tol * max(abs(params.Phi_ext), PHI0) / params.L_g
    residual = abs(flux_residual(params, phi))
    if residual >= scale:
        raise NoConvergence(f"flux residual {residual:.3e} A above tolerance {scale:.3e} A")

    logger.debug("phi_g0 = %.12f Phi0 (residual %.2e A)", x, residual)
    return phi
