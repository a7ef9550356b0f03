"""
Steady heat flow through the linearised device.

The slow mode is ignored and the working body is a single resonator at
omega_a'. Each filter f is driven by its bath noise xi_f and exchanges
energy with the other filter through the working body. With
theta_f = omega_f^2 - omega^2 - 2 i gamma_f omega,

    D      = (omega_a'^2 - omega^2) theta_h theta_c
             - omega^4 (alpha_h alpha_ha theta_c + alpha_c alpha_ca theta_h)
    G_ff   = [theta_f' (omega_a'^2 - omega^2) - alpha_f' alpha_f'a omega^4] / D
    G_ff'  = alpha_f alpha_f'a omega^4 / D

and the heat drawn from bath f is C_Sigma_f (<xi_f dphi_f/dt> - 2 gamma_f <(dphi_f/dt)^2>).
"""

import logging
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..circuit import effective_frequency
from ..constants import QUADRATURE_RTOL
from ..errors import DivisionDegenerate, QuadratureNotConverged
from ..models import DerivedParameters, EfficiencyReport, HeatFlowReport, SolverOptions
from ..spectral import FrequencyGrid, bath_psd, build_grid

logger = logging.getLogger(__name__)

_OTHER = {"h": "c", "c": "h"}
OTTO_SAMPLES = 201


def _theta(derived: DerivedParameters, f: str, w: np.ndarray) -> np.ndarray:
    return derived.omega_f(f) ** 2 - w ** 2 - 2j * derived.gamma_f(f) * w


def linear_greens(derived: DerivedParameters, omega, omega_a_eff: float
                  ) -> Dict[Tuple[str, str], np.ndarray]:
    """Filter-to-filter response functions G_ff' of the linearised device."""
    w = np.asarray(omega, dtype=float)
    theta = {f: _theta(derived, f, w) for f in ("h", "c")}
    detuning = omega_a_eff ** 2 - w ** 2
    w4 = w ** 4
    loop = {f: derived.alpha_f(f) * derived.alpha_fa(f) for f in ("h", "c")}
    den = (detuning * theta["h"] * theta["c"]
           - w4 * (loop["h"] * theta["c"] + loop["c"] * theta["h"]))
    greens = {}
    for f, g in _OTHER.items():
        greens[(f, f)] = (theta[g] * detuning - loop[g] * w4) / den
        greens[(f, g)] = derived.alpha_f(f) * derived.alpha_fa(g) * w4 / den
    return greens


def _terms(derived: DerivedParameters, grid: FrequencyGrid, model: str,
           omega_a_eff: float) -> Tuple[Dict[str, float], Dict[str, float]]:
    w = grid.points
    greens = linear_greens(derived, w, omega_a_eff)
    psd = {f: bath_psd(derived, f, w, model) for f in ("h", "c")}
    inputs, losses = {}, {}
    for f, g in _OTHER.items():
        xi_dphi = grid.integrate(w * greens[(f, f)].imag * psd[f]) / (2.0 * np.pi)
        dphi_sq = grid.integrate(w ** 2 * (np.abs(greens[(f, f)]) ** 2 * psd[f]
                                           + np.abs(greens[(f, g)]) ** 2 * psd[g])) / (2.0 * np.pi)
        c_sigma = derived.C_Sigma_f(f)
        inputs[f] = float(c_sigma * xi_dphi)
        losses[f] = float(c_sigma * 2.0 * derived.gamma_f(f) * dphi_sq)
    return inputs, losses


def otto_band(derived: DerivedParameters, A_b: float) -> Tuple[float, float, float]:
    """(eta_O, omega_min, omega_max) of omega_a' over phi_b in [-2 A_b, 2 A_b]."""
    omega = effective_frequency(derived, np.linspace(-2.0 * A_b, 2.0 * A_b, OTTO_SAMPLES))
    lo, hi = float(np.min(omega)), float(np.max(omega))
    return 1.0 - lo / hi, lo, hi


def carnot(derived: DerivedParameters) -> float:
    return 1.0 - derived.T_c / derived.T_h


def heat_flow(derived: DerivedParameters, grid: Optional[FrequencyGrid] = None,
              model: str = "quantum", omega_a_eff: Optional[float] = None,
              power: Optional[float] = None, amplitudes: Optional[Iterable[float]] = None,
              options: Optional[SolverOptions] = None) -> HeatFlowReport:
    """Heat flow report of the linearised device.

    Args:
        derived: Derived circuit parameters.
        grid: Frequency grid; built from `options` when omitted.
        model: Noise model.
        omega_a_eff: Working-body frequency; defaults to omega_a'(phi_b = 0).
        power: Output power (W); when given the efficiency is filled in.
        amplitudes: Stable-point amplitudes spanning the Otto band.
        options: Grid options and the quadrature self-check flag.

    Raises:
        QuadratureNotConverged: with `check_convergence`, if the refined grid
            moves Q_dot by more than the quadrature tolerance.
    """
    options = options or SolverOptions(model=model)
    grid = grid if grid is not None else build_grid(derived, options)
    omega_a_eff = derived.omega_a_eff0 if omega_a_eff is None else omega_a_eff

    inputs, losses = _terms(derived, grid, model, omega_a_eff)
    flows = {f: inputs[f] - losses[f] for f in ("h", "c")}

    if options.check_convergence:
        fine_in, fine_loss = _terms(derived, build_grid(derived, options.refined()), model,
                                    omega_a_eff)
        fine = fine_in["h"] - fine_loss["h"]
        if fine != 0 and abs(fine - flows["h"]) / abs(fine) > QUADRATURE_RTOL:
            raise QuadratureNotConverged(
                f"heat flow changed by {abs(fine - flows['h']) / abs(fine):.2e} on the refined grid"
            )

    report = HeatFlowReport(
        model=model,
        omega_a_eff=omega_a_eff,
        input_terms=inputs,
        dissipation_terms=losses,
        Q_dot_h=flows["h"],
        Q_dot_c=flows["c"],
        Q_dot=flows["h"],
        balance=flows["h"] + flows["c"],
        eta_carnot=carnot(derived),
    )
    updates = {}
    if power is not None:
        updates["efficiency"] = efficiency(power, report).eta
    amps = list(amplitudes or [])
    if amps:
        band = [otto_band(derived, a)[0] for a in amps]
        updates["eta_otto_min"] = min(band)
        updates["eta_otto_max"] = max(band)
    if updates:
        report = report.model_copy(update=updates)
    logger.debug("heat flow (%s): Q_h=%.4e W, Q_c=%.4e W, balance %.2e W",
                 model, report.Q_dot_h, report.Q_dot_c, report.balance)
    return report


def efficiency(power: float, report: HeatFlowReport,
               derived: Optional[DerivedParameters] = None,
               A_b: Optional[float] = None) -> EfficiencyReport:
    """eta = P / |Q_dot| with the Carnot value and, given A_b, the Otto band.

    Raises:
        DivisionDegenerate: if |Q_dot| underflows.
    """
    if not abs(report.Q_dot) > np.finfo(float).tiny:
        raise DivisionDegenerate(f"heat flow {report.Q_dot!r} W is too small for an efficiency")
    result = {"eta": power / abs(report.Q_dot), "eta_carnot": report.eta_carnot}
    if derived is not None and A_b is not None:
        eta_o, lo, hi = otto_band(derived, A_b)
        result.update(eta_otto=eta_o, omega_a_min=lo, omega_a_max=hi)
    return EfficiencyReport(**result)


def heat_flow_sensitivity(derived: DerivedParameters, omega_values: Sequence[float],
                          power: float, grid: Optional[FrequencyGrid] = None,
                          model: str = "quantum",
                          options: Optional[SolverOptions] = None) -> pd.DataFrame:
    """Heat flow and efficiency as the working-body frequency is moved."""
    options = options or SolverOptions(model=model)
    grid = grid if grid is not None else build_grid(derived, options)
    rows = []
    for omega in omega_values:
        report = heat_flow(derived, grid, model, omega_a_eff=float(omega), power=power,
                           options=options.model_copy(update={"check_convergence": False}))
        rows.append({"omega_a_eff": float(omega), "Q_dot": report.Q_dot,
                     "efficiency": report.efficiency})
    return pd.DataFrame(rows)
