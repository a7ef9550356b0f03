"""
Ensemble runs of the time-domain integrator and their frequency-domain targets.

Linear regime: the stationary variance of phi_s against
(1/2pi) int |G0(omega)|^2 S(omega) domega at the same phi_b.
Driven regime: the lock-in first harmonic of phi_s^2 against the noise
pressure of the sideband pipeline.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..constants import FILTERS, ORACLE_DRIVEN_SEEDS, ORACLE_LINEAR_SEEDS, ORACLE_SAMPLES
from ..errors import PreconditionViolated
from ..models import DerivedParameters, OracleComparison, SolverOptions
from ..slowdyn import PressureEvaluator
from ..spectral import build_grid, resonance_peaks, static_greens, total_psd
from .integrator import (
    check_damped,
    first_harmonic,
    propagate,
    simulate_driven,
    simulate_linear,
)
from .noise import max_step, synthesize_noise, welch_psd

logger = logging.getLogger(__name__)

WELCH_SEGMENT = 2 ** 14
SEED_CHUNK = 8


def _noise_block(derived: DerivedParameters, seeds: Sequence[int], dt: float, n_samples: int,
                 model: str) -> np.ndarray:
    """Noise for several seeds stacked as (n_samples, filters, seeds)."""
    return np.stack([
        np.stack([synthesize_noise(derived, f, dt, n_samples, s, model).samples for f in FILTERS],
                 axis=1)
        for s in seeds
    ], axis=2)


def _map_chunks(func, seeds: List[int], workers: int):
    chunks = [seeds[i:i + SEED_CHUNK] for i in range(0, len(seeds), SEED_CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(func, chunks))
    return [func(c) for c in chunks]


def _target_options(derived: DerivedParameters, dt: float, model: str,
                    options: Optional[SolverOptions]) -> SolverOptions:
    factor = max(math.pi / dt / derived.omega_s, 1.5)
    base = options or SolverOptions()
    return base.model_copy(update={"omega_max_factor": factor, "model": model})


def linear_target(derived: DerivedParameters, phi_b: float, dt: float, model: str = "quantum",
                  options: Optional[SolverOptions] = None) -> Tuple[float, float]:
    """(variance of phi_s, frequency of the strongest |Im G0| peak) up to pi/dt."""
    grid = build_grid(derived, _target_options(derived, dt, model, options))
    g0 = static_greens(derived, phi_b, grid.points)
    psd = total_psd(derived, grid.points, model) * derived.psd_scale
    variance = float(grid.integrate(np.abs(g0) ** 2 * psd)) / (2.0 * math.pi)
    peaks = resonance_peaks(grid.points, g0)
    return variance, (peaks[0] if peaks else math.nan)


def linear_ensemble(derived: DerivedParameters, phi_b: float = 0.0,
                    seeds: int = ORACLE_LINEAR_SEEDS, dt: Optional[float] = None,
                    n_samples: int = ORACLE_SAMPLES, model: str = "quantum",
                    base_seed: int = 0, workers: int = 1, tolerance: float = 0.05,
                    options: Optional[SolverOptions] = None) -> OracleComparison:
    """Stationary phi_s variance over an ensemble of seeds at fixed phi_b."""
    dt = dt or max_step(derived)
    check_damped(derived, phi_b)
    start = time.perf_counter()

    def run(chunk: List[int]):
        u = _noise_block(derived, chunk, dt, n_samples, model)
        field_run = propagate(derived, u, dt, phi_b_fixed=phi_b)
        steady = field_run.steady()
        omega, psd = welch_psd(steady, dt, min(WELCH_SEGMENT, steady.shape[0]))
        return np.mean(steady ** 2, axis=0), omega, psd.sum(axis=1)

    results = _map_chunks(run, list(range(base_seed, base_seed + seeds)), workers)
    variances = np.concatenate([r[0] for r in results])
    omega = results[0][1]
    mean_psd = sum(r[2] for r in results) / seeds
    positive = omega > 0
    peak = float(omega[positive][np.argmax(mean_psd[positive])])

    target, target_peak = linear_target(derived, phi_b, dt, model, options)
    estimate = float(np.mean(variances))
    stderr = float(np.std(variances, ddof=1) / math.sqrt(seeds)) if seeds > 1 else math.nan
    logger.debug("linear oracle phi_b=%.3g: %d seeds in %.1fs", phi_b, seeds,
                 time.perf_counter() - start)
    return OracleComparison(kind="linear", model=model, phi_b=phi_b, seeds=seeds,
                            target_re=target, estimate_re=estimate, stderr=stderr,
                            relative_error=abs(estimate - target) / target, tolerance=tolerance,
                            peak_omega=peak, target_peak_omega=target_peak)


def driven_target(derived: DerivedParameters, A_b: float, theta_b: float = 0.0,
                  model: str = "quantum", options: Optional[SolverOptions] = None) -> complex:
    """First harmonic exp(i theta_b) c_1 from the sideband pipeline."""
    base = (options or SolverOptions()).model_copy(update={"model": model})
    return PressureEvaluator(derived, base).pressure(A_b, theta_b)


def driven_ensemble(derived: DerivedParameters, A_b: float, theta_b: float = 0.0,
                    seeds: int = ORACLE_DRIVEN_SEEDS, dt: Optional[float] = None,
                    n_samples: int = ORACLE_SAMPLES, model: str = "quantum",
                    base_seed: int = 0, workers: int = 1, tolerance: float = 0.10,
                    options: Optional[SolverOptions] = None) -> OracleComparison:
    """Lock-in first harmonic of phi_s^2 under a prescribed sinusoidal phi_b.

    With a vanishing target the error is measured against the mean of phi_s^2.
    """
    dt = dt or max_step(derived)
    check_damped(derived, 0.0)
    start = time.perf_counter()

    def run(chunk: List[int]):
        u = _noise_block(derived, chunk, dt, n_samples, model)
        omega_b = derived.omega_b

        def flux(t):
            return 2.0 * A_b * np.cos(omega_b * t + theta_b)

        field_run = propagate(derived, u, dt, phi_b=flux)
        return first_harmonic(field_run, omega_b, theta_b), np.mean(field_run.steady() ** 2,
                                                                      axis=0)

    results = _map_chunks(run, list(range(base_seed, base_seed + seeds)), workers)
    harmonics = np.concatenate([r[0] for r in results])
    mean_square = float(np.mean(np.concatenate([r[1] for r in results])))
    estimate = complex(np.mean(harmonics))
    stderr = (float(math.sqrt(np.var(harmonics.real, ddof=1) + np.var(harmonics.imag, ddof=1))
                    / math.sqrt(seeds)) if seeds > 1 else math.nan)

    target = driven_target(derived, A_b, theta_b, model, options)
    scale = abs(target) if target != 0 else mean_square
    logger.debug("driven oracle A_b=%.3g: %d seeds in %.1fs", A_b, seeds,
                 time.perf_counter() - start)
    return OracleComparison(kind="driven", model=model, A_b=A_b, theta_b=theta_b, seeds=seeds,
                            target_re=target.real, target_im=target.imag,
                            estimate_re=estimate.real, estimate_im=estimate.imag,
                            stderr=stderr, relative_error=abs(estimate - target) / scale,
                            tolerance=tolerance)


def sample_traces(derived: DerivedParameters, regime: str, value: float, theta_b: float = 0.0,
                  n_samples: int = ORACLE_SAMPLES, seed: int = 0,
                  model: str = "quantum") -> pd.DataFrame:
    """One realisation of the noise and the fields it drives, for inspection.

    `value` is phi_b for the linear regime and A_b for the driven one. The
    noise columns hold the value applied over the step that starts at `t`.
    """
    if regime not in ("linear", "driven"):
        raise PreconditionViolated(f"unknown oracle regime '{regime}'")
    dt = max_step(derived)
    traces = {f: synthesize_noise(derived, f, dt, n_samples, seed, model) for f in FILTERS}
    if regime == "linear":
        run = simulate_linear(derived, traces, phi_b_fixed=value)
    else:
        run = simulate_driven(derived, traces, value, theta_b)
    frame = run.to_frame()
    for f in FILTERS:
        frame[f"xi_{f}"] = np.append(traces[f].samples, np.nan)
    return frame
