"""
Sideband Green's functions of the parametrically driven working body.
"""

from .banded import BandedSolution, solve_tridiagonal, thomas, tridiagonal_matvec
from .sidebands import (
    SidebandGreens,
    TridiagonalSystem,
    auto_truncate,
    build_diagonals,
    coupling,
    default_probes,
    sideband_correlation,
    solve_at,
    solve_sidebands,
    tail_ratio,
)

__all__ = [
    "BandedSolution",
    "solve_tridiagonal",
    "thomas",
    "tridiagonal_matvec",
    "SidebandGreens",
    "TridiagonalSystem",
    "build_diagonals",
    "coupling",
    "solve_sidebands",
    "solve_at",
    "auto_truncate",
    "default_probes",
    "tail_ratio",
    "sideband_correlation",
]
