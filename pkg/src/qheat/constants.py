"""
Constants for the qheat simulator.

Physical constants (CODATA, via scipy.constants), filter identifiers, and
the numerical defaults used when a caller does not override them.
"""

from typing import Tuple

from scipy import constants as sc

# =============================================================================
# PHYSICAL CONSTANTS
# =============================================================================

HBAR: float = sc.hbar
E_CHARGE: float = sc.e
K_B: float = sc.k

# Magnetic flux quantum, pi * hbar / e
PHI0: float = sc.pi * sc.hbar / sc.e


# =============================================================================
# CIRCUIT TOPOLOGY
# =============================================================================

# Filter resonators coupled to the working body, hot first.
FILTERS: Tuple[str, str] = ("h", "c")

NOISE_MODELS: Tuple[str, str] = ("quantum", "classical")

# Filter quality factor of the reference device
DEFAULT_Q_FILTER: float = 85.0


# =============================================================================
# FLUX SOLVE
# =============================================================================

FLUX_TOL: float = 1e-12
FLUX_MAX_NEWTON: int = 8


# =============================================================================
# FREQUENCY GRID
# =============================================================================

# omega_max = OMEGA_MAX_FACTOR * omega_s
OMEGA_MAX_FACTOR: float = 1.5

# Coarse spacing is omega_b / BASE_DIVISIONS, refined spacing omega_b / FINE_DIVISIONS.
BASE_DIVISIONS: int = 8
FINE_DIVISIONS: int = 512

# Refinement windows: width (in units of gamma_f) and sideband reach around omega_a'.
REFINE_WIDTH_GAMMAS: float = 20.0
REFINE_SIDEBANDS: int = 10

# Below this |hbar*omega / (2 k_B T)| the analytic limit of the quantum PSD is used.
PSD_SMALL_ARG: float = 1e-8

# Relative floor on |denominator| of the memory kernel.
POLE_RTOL: float = 1e-14


# =============================================================================
# SIDEBAND SOLVER
# =============================================================================

N_MAX_FLOOR: int = 32
N_MAX_CAP: int = 2048
GROWTH_LIMIT: float = 1e12
RESIDUAL_LIMIT: float = 1e-10
TAIL_LIMIT: float = 1e-8

# Frequencies per vectorised elimination batch.
SOLVE_CHUNK: int = 4096


# =============================================================================
# SLOW DYNAMICS
# =============================================================================

AMPLITUDE_POINTS: int = 400
AMPLITUDE_MAX: float = 0.6
AMPLITUDE_MIN: float = 1e-3
Q_B_MAX: float = 1e5
QUADRATURE_RTOL: float = 1e-4
PRESSURE_CACHE_RTOL: float = 1e-3

# Stationary points: |Gamma_tot| < STATIONARY_RTOL * omega_b / 1e6
STATIONARY_RTOL: float = 1e-3
GAMMA_REF_DIVISOR: float = 1e6


# =============================================================================
# THERMODYNAMICS
# =============================================================================

HARMONIC_CUTOFF: int = 20
HARMONIC_TAIL_LIMIT: float = 1e-4
CYCLE_SAMPLES: int = 256
# Reconstructed <phi_s^2>(t) may undershoot zero by rounding only
POSITIVITY_ATOL: float = 1e-6


# =============================================================================
# ORACLE
# =============================================================================

# dt <= 2 pi / (ORACLE_STEPS_PER_PERIOD * omega_s)
ORACLE_STEPS_PER_PERIOD: int = 20
ORACLE_TRANSIENT_DECAYS: float = 10.0
ORACLE_LINEAR_SEEDS: int = 32
ORACLE_DRIVEN_SEEDS: int = 64
ORACLE_SAMPLES: int = 2 ** 18
