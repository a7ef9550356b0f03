"""
Typed models for the qheat simulator.

Pydantic v2 models for everything that crosses a boundary: parameter
files, derived circuit quantities, drive states, solver options, sweep
specifications and reports. Array-valued results (grids, Green's function
tables, curves) are plain dataclasses in the modules that produce them.
All models support dict export via `.to_dict()`.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from .constants import (
    BASE_DIVISIONS,
    DEFAULT_Q_FILTER,
    FINE_DIVISIONS,
    FILTERS,
    OMEGA_MAX_FACTOR,
    PHI0,
    REFINE_SIDEBANDS,
    REFINE_WIDTH_GAMMAS,
)
from .errors import ConfigError

NoiseModel = Literal["quantum", "classical"]


def _check_filter(f: str) -> str:
    if f not in FILTERS:
        raise ValueError(f"Unknown filter '{f}'. Supported: {list(FILTERS)}")
    return f


# =============================================================================
# CIRCUIT PARAMETERS
# =============================================================================


class CircuitParameters(BaseModel):
    """Elementary lumped-element values of the engine circuit (SI units).

    Filter linewidths are given either directly (`gamma_h`, `gamma_c`, rad/s)
    or through quality factors (`Q_h`, `Q_c`) with gamma_f = omega_f / Q_f.
    When neither is given, Q_f = 85.

    Usage:
        params = CircuitParameters.from_file("params/table1.json")
        hot = params.with_updates(T_h=0.4)
    """

    L_a: float
    L_h: float
    L_c: float
    L_b: float
    L_g: float
    C_a: float
    C_h: float
    C_c: float
    C_b: float
    C_ha: float
    C_ca: float
    I_c: float
    Phi_ext: float
    T_c: float
    T_h: float

    gamma_h: Optional[float] = None
    gamma_c: Optional[float] = None
    Q_h: Optional[float] = None
    Q_c: Optional[float] = None

    model_config = {"frozen": True, "extra": "forbid"}

    @field_validator("L_a", "L_h", "L_c", "L_b", "L_g", "C_a", "C_h", "C_c", "C_b",
                     "C_ha", "C_ca", "T_c", "T_h")
    @classmethod
    def validate_positive(cls, v: float) -> float:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"must be finite and strictly positive, got {v}")
        return v

    @field_validator("I_c")
    @classmethod
    def validate_critical_current(cls, v: float) -> float:
        # I_c = 0 is the linear limit of the SQUID; derived parameters reject it.
        if not (v >= 0 and math.isfinite(v)):
            raise ValueError(f"I_c must be finite and non-negative, got {v}")
        return v

    @field_validator("gamma_h", "gamma_c", "Q_h", "Q_c")
    @classmethod
    def validate_optional_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not (v > 0 and math.isfinite(v)):
            raise ValueError(f"must be finite and strictly positive, got {v}")
        return v

    @model_validator(mode="after")
    def validate_temperatures(self) -> "CircuitParameters":
        if self.T_c > self.T_h:
            raise ValueError(f"T_c ({self.T_c} K) must not exceed T_h ({self.T_h} K)")
        return self

    @model_validator(mode="after")
    def validate_single_flux_minimum(self) -> "CircuitParameters":
        limit = PHI0 / (2.0 * math.pi)
        if self.I_c * self.L_g >= limit:
            raise ValueError(
                f"I_c*L_g = {self.I_c * self.L_g:.3e} Wb must stay below Phi0/(2 pi) = "
                f"{limit:.3e} Wb for a unique flux minimum"
            )
        return self

    # -------------------------------------------------------------------------
    # Per-filter accessors
    # -------------------------------------------------------------------------

    def L_f(self, f: str) -> float:
        return {"h": self.L_h, "c": self.L_c}[_check_filter(f)]

    def C_f(self, f: str) -> float:
        return {"h": self.C_h, "c": self.C_c}[_check_filter(f)]

    def C_fa(self, f: str) -> float:
        return {"h": self.C_ha, "c": self.C_ca}[_check_filter(f)]

    def C_Sigma_f(self, f: str) -> float:
        return self.C_f(f) + self.C_fa(f)

    def omega_f(self, f: str) -> float:
        return 1.0 / math.sqrt(self.L_f(f) * self.C_Sigma_f(f))

    def T_f(self, f: str) -> float:
        return {"h": self.T_h, "c": self.T_c}[_check_filter(f)]

    def gamma_f(self, f: str) -> float:
        """Filter dissipation rate, explicit or from the quality factor."""
        gamma = {"h": self.gamma_h, "c": self.gamma_c}[_check_filter(f)]
        if gamma is not None:
            return gamma
        q = {"h": self.Q_h, "c": self.Q_c}[f]
        return self.omega_f(f) / (q if q is not None else DEFAULT_Q_FILTER)

    @property
    def Phi_ext_over_Phi0(self) -> float:
        return self.Phi_ext / PHI0

    # -------------------------------------------------------------------------
    # Construction helpers
    # -------------------------------------------------------------------------

    def with_updates(self, **changes: Any) -> "CircuitParameters":
        """Return a re-validated copy with `changes` applied."""
        data = self.model_dump()
        data.update(changes)
        try:
            return CircuitParameters.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid circuit parameters: {e}") from e

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CircuitParameters":
        """Build from the flat parameter-file layout.

        Accepts `Phi_ext_over_Phi0` in place of `Phi_ext` and a shared `Q_f`
        in place of `Q_h` / `Q_c`.

        Raises:
            ConfigError: on unknown keys, missing keys or invalid values.
        """
        data = dict(data)
        if "Phi_ext_over_Phi0" in data:
            if "Phi_ext" in data:
                raise ConfigError("Give either Phi_ext or Phi_ext_over_Phi0, not both")
            data["Phi_ext"] = float(data.pop("Phi_ext_over_Phi0")) * PHI0
        if "Q_f" in data:
            q_f = data.pop("Q_f")
            data.setdefault("Q_h", q_f)
            data.setdefault("Q_c", q_f)
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid circuit parameters: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "CircuitParameters":
        """Load a JSON parameter file."""
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"Parameter file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Parameter file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Parameter file {path} must hold a flat JSON object")
        return cls.from_dict(data)

    def to_file_dict(self) -> Dict[str, Any]:
        """Inverse of `from_dict`: the flat parameter-file layout."""
        data = {k: v for k, v in self.model_dump().items() if v is not None}
        data["Phi_ext_over_Phi0"] = data.pop("Phi_ext") / PHI0
        return data

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# DERIVED PARAMETERS
# =============================================================================


class DerivedParameters(BaseModel):
    """Effective parameters of the reduced two-field model.

    Built by `qheat.circuit.derive_parameters`. Angular frequencies in rad/s,
    coupling constants g_s_sq / g_b_sq in (rad/s)^2 acting on the
    dimensionless fields phi = (pi / Phi0) * flux.
    """

    phi_g0: float
    L_J: float
    g0_sq: float
    L_a: float
    L_b: float
    C_Sigma_a: float
    C_Sigma_h: float
    C_Sigma_c: float
    omega_a: float
    omega_h: float
    omega_c: float
    omega_s: float
    omega_b: float
    N_L: float
    alpha_ha: float
    alpha_ca: float
    alpha_h: float
    alpha_c: float
    g_s_sq: float
    g_b_sq: float
    gamma_h: float
    gamma_c: float
    R_h: float
    R_c: float
    T_h: float
    T_c: float
    tau_b: float

    model_config = {"frozen": True}

    def omega_f(self, f: str) -> float:
        return {"h": self.omega_h, "c": self.omega_c}[_check_filter(f)]

    def gamma_f(self, f: str) -> float:
        return {"h": self.gamma_h, "c": self.gamma_c}[_check_filter(f)]

    def alpha_f(self, f: str) -> float:
        return {"h": self.alpha_h, "c": self.alpha_c}[_check_filter(f)]

    def alpha_fa(self, f: str) -> float:
        return {"h": self.alpha_ha, "c": self.alpha_ca}[_check_filter(f)]

    def R_f(self, f: str) -> float:
        return {"h": self.R_h, "c": self.R_c}[_check_filter(f)]

    def T_f(self, f: str) -> float:
        return {"h": self.T_h, "c": self.T_c}[_check_filter(f)]

    def C_Sigma_f(self, f: str) -> float:
        return {"h": self.C_Sigma_h, "c": self.C_Sigma_c}[_check_filter(f)]

    @property
    def psd_scale(self) -> float:
        """Factor converting flux-unit PSDs to dimensionless-field PSDs."""
        return (math.pi / PHI0) ** 2

    @property
    def omega_a_eff0(self) -> float:
        """omega_a' at phi_b = 0: 1/sqrt(C_Sigma_a (L_a + L_J/2))."""
        return 1.0 / math.sqrt(self.C_Sigma_a * (self.L_a + self.L_J / 2.0))

    def with_updates(self, **changes: Any) -> "DerivedParameters":
        return self.model_copy(update=changes)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# DRIVE STATE
# =============================================================================


class DriveState(BaseModel):
    """Amplitude and phase of the slow field, phi_b = 2 A_b cos(omega_b t + theta_b)."""

    A_b: float = 0.0
    theta_b: float = 0.0

    model_config = {"frozen": True}

    @field_validator("A_b")
    @classmethod
    def validate_amplitude(cls, v: float) -> float:
        if not (v >= 0 and math.isfinite(v)):
            raise ValueError(f"A_b must be finite and non-negative, got {v}")
        return v

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# SOLVER OPTIONS
# =============================================================================


class SolverOptions(BaseModel):
    """Numerical knobs shared by the frequency-domain pipeline."""

    model: NoiseModel = "quantum"
    base_divisions: int = BASE_DIVISIONS
    fine_divisions: int = FINE_DIVISIONS
    omega_max_factor: float = OMEGA_MAX_FACTOR
    refine_sidebands: int = REFINE_SIDEBANDS
    refine_width_gammas: float = REFINE_WIDTH_GAMMAS
    n_max: Optional[int] = None  # None -> auto_truncate
    check_convergence: bool = False
    workers: int = 1

    model_config = {"frozen": True}

    @field_validator("base_divisions", "fine_divisions", "workers")
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("omega_max_factor")
    @classmethod
    def validate_omega_max(cls, v: float) -> float:
        if v < 1.5:
            raise ValueError(f"omega_max_factor must be >= 1.5, got {v}")
        return v

    @field_validator("n_max")
    @classmethod
    def validate_n_max(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"n_max must be >= 1, got {v}")
        return v

    def refined(self) -> "SolverOptions":
        """Options with every grid spacing halved (quadrature self-check)."""
        return self.model_copy(update={
            "base_divisions": 2 * self.base_divisions,
            "fine_divisions": 2 * self.fine_divisions,
            "check_convergence": False,
        })

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# THERMODYNAMIC REPORTS
# =============================================================================


class HeatFlowReport(BaseModel):
    """Steady heat flow through the linearised device.

    Per-filter terms are powers in watts: `input_terms[f]` is
    C_Sigma_f <xi_f dphi_f/dt>, `dissipation_terms[f]` is
    C_Sigma_f 2 gamma_f <(dphi_f/dt)^2>. `Q_dot` is the heat drawn from the hot
    bath; `balance` is the sum over both filters (zero in steady state).
    """

    model: NoiseModel = "quantum"
    omega_a_eff: float = 0.0
    input_terms: Dict[str, float] = {}
    dissipation_terms: Dict[str, float] = {}
    Q_dot_h: float = 0.0
    Q_dot_c: float = 0.0
    Q_dot: float = 0.0
    balance: float = 0.0
    eta_carnot: float = 0.0
    efficiency: Optional[float] = None
    eta_otto_min: Optional[float] = None
    eta_otto_max: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


class EfficiencyReport(BaseModel):
    """Engine efficiency with its Carnot and Otto reference values."""

    eta: float
    eta_carnot: float
    eta_otto: Optional[float] = None
    omega_a_min: Optional[float] = None
    omega_a_max: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# SWEEPS
# =============================================================================

SweepKind = Literal["temperature", "gap", "filter_q", "noise_model"]


class SweepSpec(BaseModel):
    """One-parameter sweep around a base parameter file.

    kind:
        temperature  -- values are T_h in kelvin
        gap          -- values are (omega_h - omega_c) / omega_b
        filter_q     -- values are Q_f applied to both filters
        noise_model  -- values are T_h in kelvin, evaluated with both noise models
    """

    kind: SweepKind
    values: List[float]
    base: str
    outputs: str
    parallelism: int = 1
    model: NoiseModel = "quantum"
    amplitude_points: int = 400
    amplitude_max: float = 0.6
    q_b_max: float = 1e5
    options: SolverOptions = SolverOptions()

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("values must be non-empty")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("values must be strictly increasing")
        return v

    @field_validator("parallelism", "amplitude_points")
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SweepSpec":
        path = Path(path)
        try:
            return cls.model_validate(json.loads(path.read_text()))
        except FileNotFoundError as e:
            raise ConfigError(f"Sweep file not found: {path}") from e
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"Invalid sweep file {path}: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


class SweepRecord(BaseModel):
    """Summary of one sweep point."""

    kind: str
    value: float
    model: NoiseModel = "quantum"
    max_power: float = 0.0
    Q_b_at_max: Optional[float] = None
    A_b_at_max: Optional[float] = None
    efficiency: Optional[float] = None
    Q_dot: Optional[float] = None
    Q_init: float = math.inf
    Q_stop: float = math.inf
    n_stationary: int = 0
    error: Optional[str] = None

    @field_validator("max_power")
    @classmethod
    def validate_power(cls, v: float) -> float:
        if v < 0:
            raise ValueError(f"max_power must be non-negative, got {v}")
        return v

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump()


# =============================================================================
# ORACLE
# =============================================================================

OracleKind = Literal["linear", "driven"]


class OracleComparison(BaseModel):
    """Ensemble estimate from the time-domain integrator against its frequency-domain target."""

    kind: OracleKind
    model: NoiseModel = "quantum"
    phi_b: Optional[float] = None
    A_b: Optional[float] = None
    theta_b: Optional[float] = None
    seeds: int
    target_re: float
    target_im: float = 0.0
    estimate_re: float
    estimate_im: float = 0.0
    stderr: float
    relative_error: float
    tolerance: float
    peak_omega: Optional[float] = None
    target_peak_omega: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.relative_error <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump()
        data["passed"] = self.passed
        return data
