"""
Tests for the circuit layer: flux solve, derived parameters, omega_a'(phi_b).
"""

import math

import numpy as np
import pytest

from qheat.circuit import (
    derive_parameters,
    effective_frequency,
    flux_residual,
    solve_flux_minimum,
)
from qheat.constants import FLUX_TOL, PHI0
from qheat.errors import ConfigError, PreconditionViolated, SingularOperatingPoint

TWO_PI = 2.0 * math.pi


# =============================================================================
# Flux solve
# =============================================================================


def test_flux_minimum_reference_device(params):
    """Reference bias lands at phi_g0 close to 0.45 Phi0."""
    phi = solve_flux_minimum(params)
    assert phi / PHI0 == pytest.approx(0.45, rel=0.01)


def test_flux_minimum_zero_bias(params):
    assert solve_flux_minimum(params.with_updates(Phi_ext=0.0)) == 0.0


def test_flux_minimum_linear_limit(params):
    """Without a junction the loop flux equals the applied flux."""
    p = params.with_updates(I_c=0.0)
    assert solve_flux_minimum(p) == p.Phi_ext


def test_flux_minimum_uniqueness_condition(params):
    i_c = 1.1 * PHI0 / (TWO_PI * params.L_g)
    with pytest.raises(ConfigError):
        params.with_updates(I_c=i_c)
    # model_copy skips validation, so the solver guards on its own
    unchecked = params.model_copy(update={"I_c": i_c})
    with pytest.raises(PreconditionViolated):
        solve_flux_minimum(unchecked)


def test_flux_minimum_rejects_bad_tolerance(params):
    with pytest.raises(PreconditionViolated):
        solve_flux_minimum(params, tol=0.0)


def test_flux_residual_random_draws(params):
    """Residual below tolerance across the single-solution region."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        l_g = rng.uniform(10e-12, 500e-12)
        i_c = rng.uniform(0.0, 0.99) * PHI0 / (TWO_PI * l_g)
        phi_ext = rng.uniform(-2.0, 2.0) * PHI0
        p = params.with_updates(L_g=l_g, I_c=i_c, Phi_ext=phi_ext)
        phi = solve_flux_minimum(p)
        scale = FLUX_TOL * max(abs(phi_ext), PHI0) / l_g
        assert abs(flux_residual(p, phi)) < scale


# =============================================================================
# Derived parameters
# =============================================================================


def test_derived_reference_values(derived):
    """Derived quantities of the reference device, within rounding."""
    assert derived.L_J == pytest.approx(1.36e-9, rel=0.02)
    assert derived.N_L == pytest.approx(0.103, rel=0.02)
    assert derived.omega_a / TWO_PI == pytest.approx(15e9, rel=0.02)
    assert derived.omega_s / TWO_PI == pytest.approx(20.2e9, rel=0.02)
    assert derived.omega_b / TWO_PI == pytest.approx(379e6, rel=0.02)


def test_derived_self_consistency(params, derived):
    assert derived.omega_s ** 2 / derived.omega_a ** 2 - 1 == pytest.approx(
        2 * params.L_a / derived.L_J, rel=1e-12)
    assert derived.omega_b ** 2 * params.L_b * params.C_b == pytest.approx(
        1 - derived.N_L, rel=1e-12)


def test_derived_ranges(derived):
    assert 0 < derived.N_L < 1
    for f in ("h", "c"):
        assert 0 < derived.alpha_f(f) < 1
        assert 0 < derived.alpha_fa(f) < 1
    assert derived.omega_s > derived.omega_a
    assert derived.omega_b < derived.omega_c < derived.omega_h


def test_filter_resistance(params, derived):
    gamma_h = params.omega_f("h") / 85.0
    assert derived.R_h == pytest.approx(1.0 / (2 * gamma_h * params.C_Sigma_f("h")), rel=1e-12)


def test_light_slow_inductor_limit(params):
    """N_L approaches 1 when L_b is negligible against L_g and L_J."""
    d = derive_parameters(params.with_updates(L_b=1e-16))
    assert d.N_L > 0.99


def test_zero_critical_current_rejected(params):
    with pytest.raises(PreconditionViolated):
        derive_parameters(params.with_updates(I_c=0.0))


# =============================================================================
# Effective frequency
# =============================================================================


def test_effective_frequency_reference(derived):
    assert effective_frequency(derived, 0.0) / TWO_PI == pytest.approx(10.03e9, rel=0.01)


def test_effective_frequency_linear_limit(derived):
    expected = 1.0 / math.sqrt(derived.C_Sigma_a * (derived.L_a + derived.L_J / 2))
    assert effective_frequency(derived, 0.0) == pytest.approx(expected, rel=1e-14)
    assert derived.omega_a_eff0 == pytest.approx(expected, rel=1e-14)


def test_effective_frequency_uncoupled(derived):
    d = derived.with_updates(g_s_sq=0.0)
    omega = effective_frequency(d, np.linspace(-0.3, 0.3, 7))
    assert np.allclose(omega, d.omega_a_eff0, rtol=1e-14)


def test_effective_frequency_monotone(derived):
    omega = effective_frequency(derived, np.linspace(-0.3, 0.3, 601))
    steps = np.diff(omega)
    assert np.all(steps < 0) or np.all(steps > 0)


def test_effective_frequency_singular(derived):
    limit = 1.0 / (derived.g_s_sq * derived.L_J * derived.C_Sigma_a)
    with pytest.raises(SingularOperatingPoint):
        effective_frequency(derived, 1.01 * limit)
