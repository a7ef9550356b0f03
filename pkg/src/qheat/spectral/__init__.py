"""
Spectral layer: filter responses, the memory kernel, bath PSDs and the static Green's function.

Also provides the symmetric piecewise-uniform frequency grids and the
trapezoid quadrature used by the rest of the pipeline.
"""

from .functions import (
    SpectralTables,
    bath_psd,
    filter_response,
    kernel_denominator,
    memory_kernel,
    passivity_margin,
    resonance_peaks,
    spectral_tables,
    static_greens,
    total_psd,
)
from .grid import FrequencyGrid, build_grid, refinement_windows, uniform_grid

__all__ = [
    "FrequencyGrid",
    "build_grid",
    "uniform_grid",
    "refinement_windows",
    "SpectralTables",
    "spectral_tables",
    "filter_response",
    "kernel_denominator",
    "memory_kernel",
    "bath_psd",
    "total_psd",
    "static_greens",
    "resonance_peaks",
    "passivity_margin",
]
