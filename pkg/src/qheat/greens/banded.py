"""
Batched tridiagonal solver.

Thomas elimination vectorised over a batch of independent systems (one per
frequency point): the recursion runs over the band index while numpy works
across the batch. Pivot growth is monitored per system; systems whose growth
exceeds the limit, or whose residual is too large after one step of
iterative refinement, are re-solved with LAPACK's partially pivoted banded
LU (`scipy.linalg.solve_banded`).
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from ..constants import GROWTH_LIMIT, RESIDUAL_LIMIT
from ..errors import IllConditioned

logger = logging.getLogger(__name__)

Coefficient = Union[complex, np.ndarray]


@dataclass
class BandedSolution:
    """Solution of a batch of tridiagonal systems."""

    x: np.ndarray
    residual: np.ndarray  # per-system ||A x - b|| / ||b||
    growth: np.ndarray  # per-system pivot growth factor
    fallback: int = 0  # systems re-solved with pivoted LU


def _column(coefficient: Coefficient, batch: int) -> np.ndarray:
    """Broadcast a scalar or per-system coefficient to shape (batch, 1)."""
    c = np.asarray(coefficient, dtype=complex)
    return np.broadcast_to(c.reshape(-1, 1) if c.ndim else c, (batch, 1))


def tridiagonal_matvec(diag: np.ndarray, sub: Coefficient, sup: Coefficient,
                       x: np.ndarray) -> np.ndarray:
    """A x for A with main diagonal `diag`, constant sub/super diagonals per system."""
    batch = diag.shape[0]
    lower, upper = _column(sub, batch), _column(sup, batch)
    y = diag * x
    y[:, 1:] += lower * x[:, :-1]
    y[:, :-1] += upper * x[:, 1:]
    return y


def thomas(diag: np.ndarray, sub: Coefficient, sup: Coefficient,
           rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Unpivoted Thomas elimination over a batch.

    Args:
        diag: Main diagonals, shape (batch, m).
        sub: Sub-diagonal value(s): scalar or shape (batch,).
        sup: Super-diagonal value(s): scalar or shape (batch,).
        rhs: Right-hand sides, shape (batch, m).

    Returns:
        (x, growth) where growth = max |pivot| / max |A entry| per system;
        non-finite growth flags a zero pivot.
    """
    batch, m = diag.shape
    lower, upper = _column(sub, batch)[:, 0], _column(sup, batch)[:, 0]
    cp = np.empty((batch, m), dtype=complex)
    dp = np.empty((batch, m), dtype=complex)
    pivot_max = np.zeros(batch)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        pivot = diag[:, 0]
        pivot_max = np.maximum(pivot_max, np.abs(pivot))
        cp[:, 0] = upper / pivot
        dp[:, 0] = rhs[:, 0] / pivot
        for j in range(1, m):
            pivot = diag[:, j] - lower * cp[:, j - 1]
            pivot_max = np.maximum(pivot_max, np.abs(pivot))
            cp[:, j] = upper / pivot
            dp[:, j] = (rhs[:, j] - lower * dp[:, j - 1]) / pivot

        x = np.empty((batch, m), dtype=complex)
        x[:, -1] = dp[:, -1]
        for j in range(m - 2, -1, -1):
            x[:, j] = dp[:, j] - cp[:, j] * x[:, j + 1]

        scale = np.maximum(np.max(np.abs(diag), axis=1),
                           np.maximum(np.abs(lower), np.abs(upper)))
        growth = pivot_max / scale
    growth = np.where(np.all(np.isfinite(x), axis=1), growth, np.inf)
    return x, growth


def _pivoted(diag_row: np.ndarray, lower: complex, upper: complex,
             rhs_row: np.ndarray) -> np.ndarray:
    m = diag_row.shape[0]
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = diag_row
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs_row, check_finite=False)


def _relative_residual(diag, sub, sup, x, rhs) -> np.ndarray:
    r = tridiagonal_matvec(diag, sub, sup, x) - rhs
    return np.linalg.norm(r, axis=1) / np.maximum(np.linalg.norm(rhs, axis=1), 1e-300)


def solve_tridiagonal(diag: np.ndarray, sub: Coefficient, sup: Coefficient, rhs: np.ndarray,
                      growth_limit: float = GROWTH_LIMIT,
                      residual_limit: float = RESIDUAL_LIMIT) -> BandedSolution:
    """Solve a batch of tridiagonal systems to the residual limit.

    Raises:
        IllConditioned: if a system cannot be solved to `residual_limit` even
            with the pivoted fallback.
    """
    diag = np.asarray(diag, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    batch = diag.shape[0]
    x, growth = thomas(diag, sub, sup, rhs)
    residual = _relative_residual(diag, sub, sup, x, rhs)

    # One step of iterative refinement for loose systems.
    loose = (residual > residual_limit) & np.isfinite(growth)
    if np.any(loose):
        lower, upper = _column(sub, batch)[loose, 0], _column(sup, batch)[loose, 0]
        r = tridiagonal_matvec(diag[loose], lower, upper, x[loose]) - rhs[loose]
        dx, _ = thomas(diag[loose], lower, upper, r)
        x[loose] -= dx
        residual[loose] = _relative_residual(diag[loose], lower, upper, x[loose], rhs[loose])

    bad = (growth > growth_limit) | ~np.isfinite(growth) | (residual > residual_limit)
    bad_idx = np.flatnonzero(bad)
    if bad_idx.size:
        logger.debug("banded LU fallback on %d of %d systems", bad_idx.size, batch)
        lower_all, upper_all = _column(sub, batch)[:, 0], _column(sup, batch)[:, 0]
        for k in bad_idx:
            try:
                x[k] = _pivoted(diag[k], lower_all[k], upper_all[k], rhs[k])
            except (LinAlgError, ValueError) as e:
                raise IllConditioned(f"banded LU failed on system {k}: {e}") from e
        residual[bad_idx] = _relative_residual(
            diag[bad_idx], lower_all[bad_idx], upper_all[bad_idx], x[bad_idx], rhs[bad_idx])
        worst = float(np.max(residual[bad_idx]))
        if not worst <= residual_limit:
            raise IllConditioned(
                f"tridiagonal residual {worst:.2e} exceeds {residual_limit:.1e} after pivoting"
            )

    return BandedSolution(x=x, residual=residual, growth=growth, fallback=int(bad_idx.size))
