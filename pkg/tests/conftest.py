"""
Shared test fixtures for the qheat test suite.
"""

import sys
from pathlib import Path

import pytest

# Ensure src/ package is importable
SRC_DIR = str(Path(__file__).parent.parent / "src")
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from qheat.circuit import derive_parameters  # noqa: E402
from qheat.models import CircuitParameters, SolverOptions  # noqa: E402
from qheat.spectral import build_grid  # noqa: E402

PARAMS_FILE = Path(__file__).parent.parent / "params" / "table1.json"


@pytest.fixture(scope="session")
def params_file() -> Path:
    return PARAMS_FILE


@pytest.fixture(scope="session")
def params() -> CircuitParameters:
    """Elementary parameters of the reference device."""
    return CircuitParameters.from_file(PARAMS_FILE)


@pytest.fixture(scope="session")
def derived(params):
    return derive_parameters(params)


@pytest.fixture(scope="session")
def coarse_options() -> SolverOptions:
    """Grid resolution for fast tests; production runs use the defaults."""
    return SolverOptions(base_divisions=2, fine_divisions=32, refine_sidebands=6)


@pytest.fixture(scope="session")
def coarse_grid(derived, coarse_options):
    return build_grid(derived, coarse_options)


@pytest.fixture(scope="session")
def decoupled(derived):
    """Working body with both filters disconnected (no damping, no noise)."""
    return derived.with_updates(alpha_ha=0.0, alpha_ca=0.0, alpha_h=0.0, alpha_c=0.0)
