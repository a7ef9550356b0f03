"""
Tests for the time-domain oracle.

Validates:
- Noise synthesis is seeded, checked and carries the bath PSD
- The exact zero-order-hold propagation and the split driven step agree
- Lock-in extraction of the first harmonic of phi_s^2
- Ensemble estimates against the frequency-domain targets
"""

import math

import numpy as np
import pytest
from scipy.stats import linregress

from qheat.errors import PreconditionViolated
from qheat.oracle import (
    FieldRun,
    check_damped,
    discretize,
    driven_ensemble,
    first_harmonic,
    linear_ensemble,
    linear_target,
    max_step,
    propagate,
    sample_traces,
    simulate_driven,
    simulate_linear,
    state_matrices,
    synthesize_noise,
    welch_psd,
)
from qheat.spectral import bath_psd, uniform_grid


@pytest.fixture(scope="module")
def dt(derived):
    return max_step(derived)


# =============================================================================
# Noise synthesis
# =============================================================================


def test_noise_is_deterministic_per_seed(derived, dt):
    a = synthesize_noise(derived, "h", dt, 2 ** 10, seed=5)
    b = synthesize_noise(derived, "h", dt, 2 ** 10, seed=5)
    assert np.array_equal(a.samples, b.samples)
    assert a.n_samples == 2 ** 10


def test_noise_differs_across_seeds_and_filters(derived, dt):
    base = synthesize_noise(derived, "h", dt, 2 ** 10, seed=5).samples
    assert not np.allclose(base, synthesize_noise(derived, "h", dt, 2 ** 10, seed=6).samples)
    assert not np.allclose(base, synthesize_noise(derived, "c", dt, 2 ** 10, seed=5).samples)


@pytest.mark.parametrize("kwargs", [
    {"n_samples": 1000},
    {"n_samples": 1},
    {"f": "a"},
    {"dt_factor": 1.5},
])
def test_noise_preconditions(derived, dt, kwargs):
    args = {"f": "h", "n_samples": 2 ** 8, "dt_factor": 1.0}
    args.update(kwargs)
    with pytest.raises(PreconditionViolated):
        synthesize_noise(derived, args["f"], dt * args["dt_factor"], args["n_samples"], seed=0)


def test_noise_variance_matches_psd(derived, dt):
    """<xi^2> equals (1/2pi) int S d omega up to the Nyquist frequency."""
    n = 2 ** 17
    trace = synthesize_noise(derived, "h", dt, n, seed=1)
    grid = uniform_grid(math.pi / dt, 1e-4 * math.pi / dt)
    psd = bath_psd(derived, "h", grid.points) * derived.psd_scale
    expected = grid.integrate(psd) / (2 * math.pi)
    assert np.mean(trace.samples ** 2) == pytest.approx(expected, rel=0.03)


def test_noise_welch_spectrum(derived, dt):
    trace = synthesize_noise(derived, "c", dt, 2 ** 17, seed=2)
    omega, psd = trace.psd(2048)
    band = (omega > 0.2 * math.pi / dt) & (omega < 0.8 * math.pi / dt)
    target = bath_psd(derived, "c", omega[band]) * derived.psd_scale
    assert np.mean(psd[band]) == pytest.approx(np.mean(target), rel=0.05)


def test_zero_temperature_noise_is_linear_in_frequency(derived, dt):
    """Deep in the quantum regime S grows as |omega| over the whole band."""
    cold = derived.with_updates(T_h=1e-4)
    trace = synthesize_noise(cold, "h", dt, 2 ** 17, seed=4)
    omega, psd = trace.psd(2048)
    band = (omega > 0.2 * math.pi / dt) & (omega < 0.8 * math.pi / dt)
    ratio = psd[band] / omega[band]
    half = ratio.size // 2
    assert np.mean(ratio[:half]) == pytest.approx(np.mean(ratio[half:]), rel=0.05)
    expected = bath_psd(cold, "h", omega[band]) * cold.psd_scale / omega[band]
    assert np.mean(ratio) == pytest.approx(np.mean(expected), rel=0.05)
    fit = linregress(omega[band], psd[band])
    assert abs(fit.intercept) < 0.2 * fit.slope * omega[band][0]


def test_welch_psd_of_white_noise():
    rng = np.random.default_rng(0)
    omega, psd = welch_psd(rng.standard_normal(2 ** 16), 0.5, 1024)
    assert omega[0] == 0.0
    assert np.all(np.diff(omega) > 0)
    assert np.mean(psd) == pytest.approx(0.5, rel=0.03)


# =============================================================================
# Integrator
# =============================================================================


def test_discretize_free_input():
    """With no dynamics the state only accumulates input."""
    a = np.zeros((2, 2))
    b = np.array([[1.0], [2.0]])
    phi, gamma = discretize(a, b, 0.1)
    assert np.allclose(phi, np.eye(2))
    assert np.allclose(gamma, 0.1 * b)


def test_discretize_matches_closed_form():
    a = np.array([[-2.0]])
    b = np.array([[3.0]])
    phi, gamma = discretize(a, b, 0.25)
    assert phi[0, 0] == pytest.approx(math.exp(-0.5))
    assert gamma[0, 0] == pytest.approx(1.5 * (1 - math.exp(-0.5)))


def test_reference_device_is_damped(derived):
    for phi_b in (-0.27, 0.0, 0.27):
        assert check_damped(derived, phi_b) > 0


def test_state_matrices_shapes(derived):
    a, b = state_matrices(derived)
    assert a.shape == (6, 6)
    assert b.shape == (6, 2)
    assert np.all(b[:3] == 0)


def test_propagate_without_noise_stays_at_rest(derived, dt):
    run = propagate(derived, np.zeros((200, 2, 3)), dt)
    assert run.phi_s.shape == (201, 3)
    assert np.all(run.phi_s == 0)
    assert np.all(run.phi_b == 0)


def test_split_step_matches_exact_step(derived, dt):
    """A constant prescribed flux reproduces the fixed-flux propagation."""
    rng = np.random.default_rng(9)
    u = rng.standard_normal((300, 2, 2))
    fixed = propagate(derived, u, dt, phi_b_fixed=0.1)
    split = propagate(derived, u, dt, phi_b=lambda t: np.full_like(t, 0.1), phi_b_fixed=0.1)
    scale = np.max(np.abs(fixed.phi_s))
    assert np.allclose(split.phi_s, fixed.phi_s, rtol=1e-9, atol=1e-9 * scale)


def test_simulate_linear_checks_coverage(derived, dt):
    traces = {f: synthesize_noise(derived, f, dt, 2 ** 8, seed=0) for f in ("h", "c")}
    with pytest.raises(PreconditionViolated):
        simulate_linear(derived, traces, t_end=2 ** 9 * dt)
    run = simulate_linear(derived, traces, t_end=2 ** 7 * dt)
    assert len(run.t) == 2 ** 7 + 1


def test_simulate_driven_without_drive_is_linear(derived, dt):
    traces = {f: synthesize_noise(derived, f, dt, 2 ** 9, seed=3) for f in ("h", "c")}
    driven = simulate_driven(derived, traces, 0.0)
    linear = simulate_linear(derived, traces)
    scale = np.max(np.abs(linear.phi_s))
    assert np.allclose(driven.phi_s, linear.phi_s, rtol=1e-9, atol=1e-9 * scale)
    assert np.all(driven.phi_b == 0)


def test_simulate_linear_needs_common_step(derived, dt):
    traces = {"h": synthesize_noise(derived, "h", dt, 2 ** 8, seed=0),
              "c": synthesize_noise(derived, "c", dt / 2, 2 ** 8, seed=0)}
    with pytest.raises(PreconditionViolated):
        simulate_linear(derived, traces)


# =============================================================================
# Lock-in
# =============================================================================


def _modulated_run(omega_b, theta_b, periods=10, per_period=128):
    dt = 2 * math.pi / omega_b / per_period
    t = np.arange(periods * per_period + 1) * dt
    phi_s = np.sqrt(1.0 + 0.5 * np.cos(omega_b * t + theta_b))[:, None]
    zeros = np.zeros_like(phi_s)
    return FieldRun(dt=dt, phi_a=zeros, phi_s=phi_s, phi_h=zeros, phi_c=zeros)


@pytest.mark.parametrize("theta_b", [0.0, 0.7])
def test_first_harmonic_of_modulated_square(theta_b):
    omega_b = 2 * math.pi * 3.79e8
    c1 = first_harmonic(_modulated_run(omega_b, theta_b), omega_b, theta_b)
    assert c1.shape == (1,)
    assert c1[0] == pytest.approx(0.25, abs=1e-12)


def test_first_harmonic_needs_a_period():
    run = _modulated_run(1.0, 0.0, periods=1, per_period=16)
    run.transient = 8
    with pytest.raises(PreconditionViolated):
        first_harmonic(run, 1.0)


# =============================================================================
# Ensembles
# =============================================================================


def test_linear_target_is_positive(derived, dt):
    variance, peak = linear_target(derived, 0.0, dt)
    assert variance > 0
    assert peak > 0


def test_linear_ensemble_small(derived):
    result = linear_ensemble(derived, 0.0, seeds=16, n_samples=2 ** 16, tolerance=0.5)
    assert result.kind == "linear"
    assert result.estimate_re > 0
    assert math.isfinite(result.stderr)
    assert result.passed
    step = 2 * math.pi / (2 ** 14 * max_step(derived))
    assert abs(result.peak_omega - result.target_peak_omega) <= 3 * step


def test_sample_traces_driven(derived):
    frame = sample_traces(derived, "driven", 0.2, n_samples=2 ** 9, seed=1)
    assert len(frame) == 2 ** 9 + 1
    assert frame["phi_b"].iloc[0] == pytest.approx(0.4)
    assert frame["xi_c"].iloc[:-1].notna().all()
    assert {"t", "phi_a", "phi_s", "phi_h", "phi_c", "xi_h"} <= set(frame.columns)


def test_sample_traces_unknown_regime(derived):
    with pytest.raises(PreconditionViolated):
        sample_traces(derived, "bogus", 0.0, n_samples=2 ** 9)


def test_driven_ensemble_undriven(derived):
    """At A_b = 0 the first harmonic vanishes against <phi_s^2>."""
    result = driven_ensemble(derived, 0.0, seeds=16, n_samples=2 ** 16, tolerance=0.3)
    assert result.target_re == 0.0 and result.target_im == 0.0
    assert result.passed


# =============================================================================
# Acceptance runs
# =============================================================================


@pytest.mark.slow
@pytest.mark.parametrize("phi_b", [-0.27, 0.0, 0.27])
def test_linear_oracle_acceptance(derived, phi_b):
    result = linear_ensemble(derived, phi_b, seeds=32, workers=8)
    assert result.passed, result.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("A_b", [0.15, 0.45])
def test_driven_oracle_acceptance(derived, A_b):
    result = driven_ensemble(derived, A_b, seeds=64, workers=8)
    assert result.passed, result.to_dict()
