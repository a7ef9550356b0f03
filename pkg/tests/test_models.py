"""
Tests for Pydantic models in src/qheat/models.py.

Validates:
- CircuitParameters loading, aliases and validation
- SolverOptions defaults and refinement
- SweepSpec validation
- OracleComparison pass/fail reporting
"""

import json
import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from qheat.constants import DEFAULT_Q_FILTER, PHI0
from qheat.errors import ConfigError
from qheat.models import (
    CircuitParameters,
    DriveState,
    OracleComparison,
    SolverOptions,
    SweepRecord,
    SweepSpec,
)


PARAMS_FILE = Path(__file__).parent.parent / "params" / "table1.json"


def _reference_device() -> dict:
    return json.loads(PARAMS_FILE.read_text())


# =============================================================================
# CircuitParameters
# =============================================================================


def test_from_file_converts_flux_and_quality(params):
    """Phi_ext_over_Phi0 becomes webers and Q_f applies to both filters."""
    assert params.Phi_ext == pytest.approx(0.5253 * PHI0, rel=1e-12)
    assert params.Q_h == params.Q_c == 85.0
    assert params.gamma_h is None


def test_gamma_from_quality_factor(params):
    """gamma_f = omega_f / Q_f."""
    for f in ("h", "c"):
        assert params.gamma_f(f) == pytest.approx(params.omega_f(f) / 85.0, rel=1e-14)


def test_gamma_default_quality_factor():
    """Without gamma or Q the filters use the default Q."""
    data = _reference_device()
    data.pop("Q_f")
    p = CircuitParameters.from_dict(data)
    assert p.gamma_f("h") == pytest.approx(p.omega_f("h") / DEFAULT_Q_FILTER)


def test_explicit_gamma_wins():
    data = _reference_device()
    data["gamma_h"] = 1.0e8
    p = CircuitParameters.from_dict(data)
    assert p.gamma_f("h") == 1.0e8


def test_file_dict_roundtrip(params):
    """to_file_dict is the inverse of from_dict."""
    again = CircuitParameters.from_dict(params.to_file_dict())
    assert again.Phi_ext == pytest.approx(params.Phi_ext, rel=1e-14)
    assert again.L_b == params.L_b


@pytest.mark.parametrize("key,value", [("L_a", -1e-9), ("C_b", 0.0), ("I_c", -1e-6),
                                       ("T_c", float("nan"))])
def test_invalid_values_rejected(key, value):
    data = _reference_device()
    data[key] = value
    with pytest.raises(ConfigError):
        CircuitParameters.from_dict(data)


def test_cold_bath_hotter_than_hot_rejected():
    data = _reference_device()
    data["T_c"] = 0.5
    with pytest.raises(ConfigError):
        CircuitParameters.from_dict(data)


def test_multiple_flux_minima_rejected():
    """A device with I_c L_g above Phi0 / 2pi has no unique bias point."""
    data = _reference_device()
    data["I_c"] = 1.01 * PHI0 / (2 * math.pi * data["L_g"])
    with pytest.raises(ConfigError, match="unique flux minimum"):
        CircuitParameters.from_dict(data)


def test_unknown_key_rejected():
    data = _reference_device()
    data["L_x"] = 1e-9
    with pytest.raises(ConfigError):
        CircuitParameters.from_dict(data)


def test_both_flux_forms_rejected():
    data = _reference_device()
    data["Phi_ext"] = 1e-15
    with pytest.raises(ConfigError):
        CircuitParameters.from_dict(data)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        CircuitParameters.from_file(tmp_path / "absent.json")


def test_non_object_file(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        CircuitParameters.from_file(path)


def test_with_updates_revalidates(params):
    """Updates go through validation and surface as ConfigError."""
    assert params.with_updates(T_h=0.4).T_h == 0.4
    with pytest.raises(ConfigError):
        params.with_updates(T_h=0.001)


def test_unknown_filter(params):
    with pytest.raises(ValueError):
        params.omega_f("x")


# =============================================================================
# DriveState / SolverOptions
# =============================================================================


def test_drive_state_rejects_negative_amplitude():
    with pytest.raises(ValidationError):
        DriveState(A_b=-0.1)


def test_solver_options_refined():
    """refined() halves every spacing and drops the self-check."""
    opts = SolverOptions(check_convergence=True)
    fine = opts.refined()
    assert fine.base_divisions == 2 * opts.base_divisions
    assert fine.fine_divisions == 2 * opts.fine_divisions
    assert fine.check_convergence is False


@pytest.mark.parametrize("field,value", [("workers", 0), ("n_max", 0),
                                         ("omega_max_factor", 1.0), ("model", "bogus")])
def test_solver_options_invalid(field, value):
    with pytest.raises(ValidationError):
        SolverOptions(**{field: value})


# =============================================================================
# SweepSpec / SweepRecord
# =============================================================================


def test_sweep_spec_requires_increasing_values():
    with pytest.raises(ValidationError):
        SweepSpec(kind="temperature", values=[0.3, 0.2], base="p.json", outputs="out")


def test_sweep_spec_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        SweepSpec(kind="pressure", values=[1.0], base="p.json", outputs="out")


def test_sweep_spec_from_file(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps({"kind": "gap", "values": [6.0, 8.0], "base": "p.json",
                                "outputs": "out", "options": {"fine_divisions": 64}}))
    spec = SweepSpec.from_file(path)
    assert spec.kind == "gap"
    assert spec.options.fine_divisions == 64

    path.write_text("{")
    with pytest.raises(ConfigError):
        SweepSpec.from_file(path)


def test_sweep_record_defaults():
    record = SweepRecord(kind="temperature", value=0.3)
    assert record.max_power == 0.0
    assert math.isinf(record.Q_init)
    assert record.to_dict()["error"] is None


# =============================================================================
# OracleComparison
# =============================================================================


def test_oracle_comparison_passed():
    ok = OracleComparison(kind="linear", seeds=32, target_re=1.0, estimate_re=1.02,
                          stderr=0.01, relative_error=0.02, tolerance=0.05)
    bad = ok.model_copy(update={"relative_error": 0.2})
    assert ok.passed
    assert not bad.passed
    assert ok.to_dict()["passed"] is True
