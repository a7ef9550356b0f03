"""
Tests for the spectral layer: filter responses, memory kernel, PSDs, G0, grids.
"""

import math

import numpy as np
import pytest
from scipy.signal import find_peaks

from qheat.circuit import effective_frequency
from qheat.constants import HBAR, K_B
from qheat.errors import PoleEncountered, PreconditionViolated
from qheat.models import SolverOptions
from qheat.spectral import (
    bath_psd,
    build_grid,
    filter_response,
    memory_kernel,
    passivity_margin,
    refinement_windows,
    resonance_peaks,
    spectral_tables,
    static_greens,
    total_psd,
    uniform_grid,
)


@pytest.fixture(scope="module")
def random_omega(derived):
    rng = np.random.default_rng(11)
    return rng.uniform(0.01, 1.5, 1000) * derived.omega_s


# =============================================================================
# Memory kernel and filter responses
# =============================================================================


def test_kernel_at_zero_frequency(derived):
    assert memory_kernel(derived, 0.0) == derived.omega_a ** 2


def test_kernel_uncoupled_filters(decoupled):
    w = np.array([0.3, 0.7, 1.2]) * decoupled.omega_a
    expected = decoupled.omega_a ** 4 / (decoupled.omega_a ** 2 - w ** 2)
    assert np.allclose(memory_kernel(decoupled, w), expected, rtol=1e-13)


def test_kernel_pole_without_damping(decoupled):
    with pytest.raises(PoleEncountered) as info:
        memory_kernel(decoupled, decoupled.omega_a)
    assert info.value.omega == pytest.approx(decoupled.omega_a)


def test_kernel_reference_value(derived):
    k = memory_kernel(derived, 2 * math.pi * 10e9)
    assert np.isfinite(k)
    assert k.imag != 0


def test_reality_symmetries(derived, random_omega):
    """K(-w) = K(w)*, p_f(-w) = p_f(w)*, S(-w) = S(w) >= 0."""
    w = random_omega
    assert np.allclose(memory_kernel(derived, -w), np.conj(memory_kernel(derived, w)),
                       rtol=1e-12, atol=0)
    for f in ("h", "c"):
        assert np.allclose(filter_response(derived, f, -w), np.conj(filter_response(derived, f, w)),
                           rtol=1e-12, atol=0)
        assert np.allclose(bath_psd(derived, f, -w), bath_psd(derived, f, w), rtol=1e-12)
    s = total_psd(derived, w)
    assert np.allclose(total_psd(derived, -w), s, rtol=1e-12)
    assert np.all(s >= 0)


def test_passivity(derived, coarse_grid):
    """Im K and Im G0 keep one sign on omega > 0."""
    k_min, g_min = passivity_margin(derived, coarse_grid.points)
    assert k_min >= 0
    assert g_min >= 0


# =============================================================================
# Bath PSDs
# =============================================================================


def test_psd_zero_frequency_limit(derived):
    for f in ("h", "c"):
        expected = 8 * derived.gamma_f(f) ** 2 * derived.R_f(f) * K_B * derived.T_f(f)
        assert bath_psd(derived, f, 0.0) == pytest.approx(expected, rel=1e-14)


def test_psd_zero_temperature_limit(derived):
    cold = derived.with_updates(T_h=1e-6)
    w = np.array([1.0, 2.0]) * cold.omega_h
    expected = 4 * HBAR * w * cold.gamma_h ** 2 * cold.R_h
    assert np.allclose(bath_psd(cold, "h", w), expected, rtol=1e-12)


def test_quantum_and_classical_agree_when_hot(derived):
    """Within 1% wherever hbar omega / k_B T < 0.02."""
    w = np.linspace(0.0, 0.02, 50) * K_B * derived.T_h / HBAR
    quantum = bath_psd(derived, "h", w, "quantum")
    classical = bath_psd(derived, "h", w, "classical")
    assert np.all(np.abs(quantum / classical - 1) < 0.01)


def test_psd_unknown_model(derived):
    with pytest.raises(PreconditionViolated):
        bath_psd(derived, "h", 1.0, "bogus")


def test_total_psd_without_injection(derived):
    quiet = derived.with_updates(alpha_ha=0.0, alpha_ca=0.0)
    w = np.linspace(-2, 2, 41) * quiet.omega_h
    assert np.all(total_psd(quiet, w) == 0)


def test_total_psd_filter_peaks(derived):
    """Local maxima of S sit near the filter frequencies."""
    w = np.linspace(0.5, 1.4, 20001) * derived.omega_h
    s = total_psd(derived, w)
    peaks, _ = find_peaks(s)
    located = w[peaks]
    for f in ("h", "c"):
        assert np.min(np.abs(located - derived.omega_f(f))) < 0.02 * derived.omega_f(f)


# =============================================================================
# Static Green's function
# =============================================================================


def test_static_greens_peak_at_effective_frequency(derived):
    """With weak filter coupling the |Im G0| peak sits at omega_a'(0)."""
    weak = derived.with_updates(alpha_ha=1e-4 * derived.alpha_ha, alpha_ca=1e-4 * derived.alpha_ca,
                                alpha_h=1e-4 * derived.alpha_h, alpha_c=1e-4 * derived.alpha_c)
    target = effective_frequency(weak, 0.0)
    step = weak.omega_b / 256
    w = target + step * np.arange(-2000, 2001) + 0.37 * step
    g0 = static_greens(weak, 0.0, w)
    assert abs(w[np.argmax(np.abs(g0.imag))] - target) <= step


@pytest.mark.parametrize("phi_b", [-0.1, 0.0, 0.1])
def test_static_greens_working_body_peak_follows_bias(derived, phi_b):
    w = np.linspace(0.3, 1.5, 40001) * derived.omega_a
    peaks = resonance_peaks(w, static_greens(derived, phi_b, w))
    assert len(peaks) >= 3
    target = effective_frequency(derived, phi_b)
    assert np.min(np.abs(np.array(peaks) - target)) < 0.03 * target


def test_spectral_tables_columns(derived, coarse_grid):
    tables = spectral_tables(derived, coarse_grid)
    columns = tables.columns(derived, 0.1)
    assert set(columns) == {"omega_rad_s", "re_K", "im_K", "S_total", "S_h", "S_c",
                            "re_G0", "im_G0"}
    g0 = static_greens(derived, 0.1, coarse_grid.points)
    assert np.allclose(columns["re_G0"] + 1j * columns["im_G0"], g0, rtol=1e-12)


# =============================================================================
# Grids
# =============================================================================


def test_uniform_grid_integrates_constants():
    grid = uniform_grid(10.0, 0.1)
    assert grid.is_symmetric
    assert 0.0 in grid.points
    assert grid.integrate(np.ones(len(grid))) == pytest.approx(20.0, rel=1e-14)


def test_build_grid_structure(derived, coarse_options, coarse_grid):
    pts = coarse_grid.points
    assert coarse_grid.is_symmetric
    assert np.all(np.diff(pts) > 0)
    assert np.count_nonzero(pts == 0.0) == 1
    assert coarse_grid.omega_max == pytest.approx(coarse_options.omega_max_factor
                                                  * derived.omega_s)
    mirror = coarse_grid.mirror_index()
    assert np.allclose(pts[mirror], -pts, atol=1e-9 * coarse_grid.omega_max)


def test_build_grid_refines_windows(derived, coarse_options, coarse_grid):
    pts = coarse_grid.points
    fine = derived.omega_b / coarse_options.fine_divisions
    lo, hi = refinement_windows(derived, coarse_options)[0]
    inside = pts[(pts > lo) & (pts < hi)]
    assert np.max(np.diff(inside)) <= fine * (1 + 1e-9)


def test_refined_options_double_the_grid(derived, coarse_options, coarse_grid):
    finer = build_grid(derived, coarse_options.refined())
    assert len(finer) > 1.8 * len(coarse_grid)


def test_default_grid_options(derived):
    windows = refinement_windows(derived, SolverOptions())
    assert windows == sorted(windows)
    assert all(lo < hi for lo, hi in windows)
