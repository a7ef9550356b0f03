"""
Tests for the sideband Green's functions and the batched tridiagonal solver.
"""

import cmath

import numpy as np
import pytest

from qheat.constants import N_MAX_FLOOR, RESIDUAL_LIMIT, TAIL_LIMIT
from qheat.errors import IllConditioned, NoTailDecay, PreconditionViolated
from qheat.greens import (
    auto_truncate,
    build_diagonals,
    coupling,
    sideband_correlation,
    solve_at,
    solve_sidebands,
    solve_tridiagonal,
    thomas,
    tridiagonal_matvec,
)
from qheat.models import DriveState
from qheat.spectral import memory_kernel


def _dense(diag, sub, sup):
    m = len(diag)
    return np.diag(diag) + np.diag(np.full(m - 1, sub), -1) + np.diag(np.full(m - 1, sup), 1)


@pytest.fixture(scope="module")
def driven(derived, coarse_grid):
    return solve_sidebands(derived, DriveState(A_b=0.15), coarse_grid)


# =============================================================================
# Banded solver
# =============================================================================


def test_thomas_matches_dense_solve():
    rng = np.random.default_rng(3)
    diag = 4.0 + rng.normal(size=(5, 9)) + 1j * rng.normal(size=(5, 9))
    sub, sup = 0.7 - 0.2j, -0.5 + 0.4j
    rhs = rng.normal(size=(5, 9)) + 0j
    x, growth = thomas(diag, sub, sup, rhs)
    for k in range(5):
        expected = np.linalg.solve(_dense(diag[k], sub, sup), rhs[k])
        assert np.allclose(x[k], expected, rtol=1e-12, atol=1e-14)
    assert np.all(np.isfinite(growth))


def test_matvec_inverts_solution():
    rng = np.random.default_rng(4)
    diag = 3.0 + rng.normal(size=(3, 7)) + 0j
    rhs = rng.normal(size=(3, 7)) + 0j
    solution = solve_tridiagonal(diag, 0.5, 0.5j, rhs)
    assert np.allclose(tridiagonal_matvec(diag, 0.5, 0.5j, solution.x), rhs, atol=1e-12)
    assert np.all(solution.residual < RESIDUAL_LIMIT)
    assert solution.fallback == 0


def test_zero_pivot_falls_back_to_pivoted_lu():
    """A vanishing leading pivot is handled by banded LU."""
    diag = np.array([[0.0, 2.0, 3.0, 4.0]], dtype=complex)
    rhs = np.array([[1.0, 0.0, 0.0, 1.0]], dtype=complex)
    solution = solve_tridiagonal(diag, 1.0, 1.0, rhs)
    expected = np.linalg.solve(_dense(diag[0], 1.0, 1.0), rhs[0])
    assert solution.fallback == 1
    assert np.allclose(solution.x[0], expected, rtol=1e-12)


def test_singular_system_raises():
    diag = np.zeros((1, 4), dtype=complex)
    rhs = np.ones((1, 4), dtype=complex)
    with pytest.raises(IllConditioned):
        solve_tridiagonal(diag, 0.0, 0.0, rhs)


# =============================================================================
# System assembly
# =============================================================================


def test_undriven_system_has_no_coupling(derived):
    system = build_diagonals(derived, DriveState(A_b=0.0), [1e10], 4)
    assert system.sub == 0 and system.sup == 0
    assert system.diag.shape == (1, 9)
    shifted = 1e10 + system.orders * derived.omega_b
    assert np.allclose(system.diag[0], derived.omega_s ** 2 - memory_kernel(derived, shifted))


def test_coupling_phase(derived):
    r0 = coupling(derived, DriveState(A_b=0.2))
    r = coupling(derived, DriveState(A_b=0.2, theta_b=0.8))
    assert r == pytest.approx(r0 * cmath.exp(0.8j), rel=1e-14)
    assert r0 == pytest.approx(-2 * derived.g_s_sq * 0.2)


def test_truncation_must_be_positive(derived):
    with pytest.raises(PreconditionViolated):
        build_diagonals(derived, DriveState(A_b=0.1), [1e10], 0)


# =============================================================================
# Sideband solve
# =============================================================================


def test_undriven_solution_is_static_greens(derived, coarse_grid):
    greens = solve_sidebands(derived, DriveState(A_b=0.0), coarse_grid, n_max=4)
    p = derived.omega_s ** 2 - memory_kernel(derived, coarse_grid.points)
    assert np.allclose(greens.coefficient(0), 1.0 / p, rtol=1e-12)
    for n in (-4, -1, 1, 4):
        assert np.all(greens.coefficient(n) == 0)
    assert np.all(greens.coefficient(7) == 0)


def test_solution_invariants(driven):
    assert driven.residual_norm < RESIDUAL_LIMIT
    assert driven.tail_ratio < TAIL_LIMIT
    assert driven.coefficients.shape == (len(driven.grid), 2 * driven.n_max + 1)


def test_mirror_symmetry(driven):
    """G_{-n}(-omega) = G_n(omega)*."""
    mirror = driven.grid.mirror_index()
    g = driven.coefficients
    assert np.allclose(g[mirror, ::-1], np.conj(g), rtol=1e-9, atol=1e-12 * np.max(np.abs(g)))


def test_phase_gauge_covariance(derived, coarse_grid, driven):
    """G_n at theta_b equals exp(-i n theta_b) G_n at theta_b = 0."""
    theta = 1.1
    rotated = solve_sidebands(derived, DriveState(A_b=0.15, theta_b=theta), coarse_grid,
                              n_max=driven.n_max)
    phase = np.exp(-1j * driven.orders * theta)
    scale = np.max(np.abs(driven.coefficients))
    assert np.allclose(rotated.coefficients, driven.coefficients * phase[None, :],
                       rtol=1e-10, atol=1e-10 * scale)


def test_first_correlation_is_even(driven):
    corr = sideband_correlation(driven, 1)
    mirror = driven.grid.mirror_index()
    assert np.allclose(corr[mirror], corr, rtol=1e-9, atol=1e-12 * np.max(np.abs(corr)))


def test_correlation_beyond_ladder_vanishes(driven):
    assert np.all(sideband_correlation(driven, 2 * driven.n_max + 1) == 0)


def test_solve_at_matches_grid_solution(derived, driven):
    k = len(driven.grid) // 3
    direct = solve_at(derived, driven.drive, driven.grid.points[k], driven.n_max)
    assert np.allclose(direct[0], driven.coefficients[k], rtol=1e-12)


def test_threaded_solve_matches_serial(derived, coarse_grid, driven):
    threaded = solve_sidebands(derived, driven.drive, coarse_grid, n_max=driven.n_max,
                               workers=3, chunk=257)
    assert np.allclose(threaded.coefficients, driven.coefficients, rtol=1e-13, atol=0)


def test_short_ladder_is_rejected(derived, coarse_grid):
    with pytest.raises(NoTailDecay):
        solve_sidebands(derived, DriveState(A_b=0.3), coarse_grid, n_max=2)


# =============================================================================
# Automatic truncation
# =============================================================================


def test_auto_truncate_floor_when_undriven(derived):
    assert auto_truncate(derived, DriveState(A_b=0.0)) == N_MAX_FLOOR


def test_auto_truncate_grows_with_amplitude(derived):
    orders = [auto_truncate(derived, DriveState(A_b=a)) for a in (0.02, 0.15, 0.27)]
    assert orders == sorted(orders)
    assert orders[-1] <= 1024


def test_auto_truncate_needs_probes(derived):
    with pytest.raises(PreconditionViolated):
        auto_truncate(derived, DriveState(A_b=0.1), probe_omegas=[])


def test_auto_truncate_cap(derived):
    with pytest.raises(NoTailDecay):
        auto_truncate(derived, DriveState(A_b=0.3), floor=2, cap=4)
