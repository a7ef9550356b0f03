"""
One-parameter sweeps around a base circuit.

Each sweep value becomes an independent point: a full gamma_b = 0
dissipation curve, power maximisation over admissible stable points, start
and stop thresholds, heat flow and efficiency. Points run in worker
processes and are persisted one directory each, so an interrupted sweep
resumes where it stopped.
"""

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.stats import linregress

from .. import __version__
from ..circuit import derive_parameters
from ..errors import ConfigError
from ..models import CircuitParameters, SweepRecord, SweepSpec
from ..slowdyn import (
    DissipationCurve,
    PressureEvaluator,
    amplitude_grid,
    dissipation_curve,
    max_power,
    power_curve,
    q_thresholds,
)
from ..thermo import heat_flow
from .io import read_json, write_csv, write_json

logger = logging.getLogger(__name__)

MODELS_FOR = {"noise_model": ("quantum", "classical")}


# =============================================================================
# SWEEP AXES
# =============================================================================


def with_gap(params: CircuitParameters, gap: float, omega_b: float) -> CircuitParameters:
    """Move omega_h and omega_c symmetrically about their mean so omega_h - omega_c = gap * omega_b.

    Filter inductances are rescaled; capacitances, and so C_Sigma_f, stay
    fixed. An explicit gamma_f is scaled with omega_f to keep gamma_f / omega_f.
    """
    mean = 0.5 * (params.omega_f("h") + params.omega_f("c"))
    half = 0.5 * gap * omega_b
    targets = {"h": mean + half, "c": mean - half}
    if targets["c"] <= 0:
        raise ConfigError(f"gap {gap} omega_b leaves no room for omega_c")
    changes: Dict[str, Any] = {}
    for f, omega in targets.items():
        changes[f"L_{f}"] = 1.0 / (omega ** 2 * params.C_Sigma_f(f))
        explicit = getattr(params, f"gamma_{f}")
        if explicit is not None:
            changes[f"gamma_{f}"] = explicit * omega / params.omega_f(f)
    return params.with_updates(**changes)


def apply_value(params: CircuitParameters, kind: str, value: float) -> CircuitParameters:
    """Base parameters with one sweep value applied."""
    if kind in ("temperature", "noise_model"):
        if value < params.T_c:
            raise ConfigError(f"T_h={value} K is below T_c={params.T_c} K")
        return params.with_updates(T_h=value)
    if kind == "filter_q":
        return params.with_updates(Q_h=value, Q_c=value, gamma_h=None, gamma_c=None)
    if kind == "gap":
        return with_gap(params, value, derive_parameters(params).omega_b)
    raise ConfigError(f"unknown sweep kind '{kind}'")


def point_key(kind: str, value: float, model: str) -> str:
    payload = json.dumps({"kind": kind, "value": float(value), "model": model}, sort_keys=True)
    return hashlib.sha1(payload.encode()).hexdigest()[:10]


# =============================================================================
# ONE POINT
# =============================================================================


def evaluate_point(params: CircuitParameters, spec: SweepSpec, value: float,
                   model: str) -> Tuple[SweepRecord, DissipationCurve]:
    """Full engine analysis at one sweep value."""
    point = apply_value(params, spec.kind, value)
    derived = derive_parameters(point)
    options = spec.options.model_copy(update={"model": model})
    evaluator = PressureEvaluator(derived, options)
    amplitudes = amplitude_grid(spec.amplitude_points, spec.amplitude_max)
    curve = dissipation_curve(derived, amplitudes, 0.0, options, evaluator=evaluator)

    best = max_power(derived, curve, spec.q_b_max)
    q_init, q_stop = q_thresholds(derived, curve)
    stable = [p.A_b for p in power_curve(derived, curve, spec.q_b_max)]
    record = SweepRecord(kind=spec.kind, value=value, model=model,
                         Q_init=q_init, Q_stop=q_stop,
                         n_stationary=len(curve.stationary_points))
    if best is not None:
        report = heat_flow(derived, evaluator.grid, model, power=best.power, amplitudes=stable)
        record = record.model_copy(update={
            "max_power": best.power,
            "Q_b_at_max": best.Q_b,
            "A_b_at_max": best.A_b,
            "efficiency": report.efficiency,
            "Q_dot": report.Q_dot,
        })
    return record, curve


def _run_point(job: Dict[str, Any]) -> Dict[str, Any]:
    """Worker entry: evaluate, persist and return one record as a dict."""
    spec = SweepSpec.model_validate(job["spec"])
    params = CircuitParameters.model_validate(job["params"])
    directory = Path(job["directory"])
    value, model = job["value"], job["model"]
    start = time.perf_counter()
    try:
        record, curve = evaluate_point(params, spec, value, model)
        write_csv(directory / "curve.csv", curve.to_frame())
    except Exception as e:
        logger.error("sweep point %s=%g (%s) failed: %s", spec.kind, value, model, e,
                     exc_info=True)
        record = SweepRecord(kind=spec.kind, value=value, model=model,
                             error=f"{type(e).__name__}: {e}")
    write_json(directory / "record.json", record.to_dict())
    logger.info("sweep point %s=%g (%s) done in %.1fs", spec.kind, value, model,
                time.perf_counter() - start)
    return record.to_dict()


# =============================================================================
# SWEEPS
# =============================================================================


def _manifest(params: CircuitParameters, spec: SweepSpec) -> Dict[str, Any]:
    return {
        "version": __version__,
        "base_parameters": params.to_file_dict(),
        "spec": spec.to_dict(),
    }


def run_sweep(spec: SweepSpec, params: Optional[CircuitParameters] = None) -> List[SweepRecord]:
    """Evaluate every sweep value, resuming from completed points.

    Returns the records in value order (quantum before classical for
    noise-model sweeps). Failures are recorded per point.
    """
    params = params or CircuitParameters.from_file(spec.base)
    out = Path(spec.outputs)
    write_json(out / "manifest.json", _manifest(params, spec))

    models = MODELS_FOR.get(spec.kind, (spec.model,))
    jobs, records = [], {}
    for model in models:
        for value in spec.values:
            key = point_key(spec.kind, value, model)
            directory = out / "points" / key
            if (directory / "record.json").exists():
                records[key] = read_json(directory / "record.json")
                logger.debug("sweep point %s=%g (%s) already complete", spec.kind, value, model)
                continue
            jobs.append({"spec": spec.to_dict(), "params": params.to_dict(), "value": value,
                         "model": model, "directory": str(directory), "key": key})

    logger.info("sweep %s: %d points to run, %d complete", spec.kind, len(jobs), len(records))
    if spec.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.parallelism) as executor:
            results = list(executor.map(_run_point, jobs))
    else:
        results = [_run_point(job) for job in jobs]
    for job, result in zip(jobs, results):
        records[job["key"]] = result

    ordered = [SweepRecord.model_validate(records[point_key(spec.kind, v, m)])
               for m in models for v in spec.values]
    write_csv(out / "summary.csv", pd.DataFrame([r.to_dict() for r in ordered]))
    return ordered


@dataclass
class ClassicalComparison:
    """Quantum and classical records over one temperature axis."""

    quantum: List[SweepRecord]
    classical: List[SweepRecord]
    slope: float = math.nan  # W / K
    intercept: float = math.nan
    r_squared: float = math.nan
    pairs: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"slope": self.slope, "intercept": self.intercept, "r_squared": self.r_squared,
                "pairs": self.pairs}


def run_classical_comparison(spec: SweepSpec,
                             params: Optional[CircuitParameters] = None) -> ClassicalComparison:
    """Temperature sweep with both noise models and a linear fit of classical max power."""
    spec = spec.model_copy(update={"kind": "noise_model"})
    records = run_sweep(spec, params)
    quantum = [r for r in records if r.model == "quantum"]
    classical = [r for r in records if r.model == "classical"]
    pairs = [{"T_h": q.value, "quantum_max_power": q.max_power,
              "classical_max_power": c.max_power} for q, c in zip(quantum, classical)]

    result = ClassicalComparison(quantum=quantum, classical=classical, pairs=pairs)
    ok = [r for r in classical if r.error is None]
    if len(ok) >= 3:
        fit = linregress(np.array([r.value for r in ok]), np.array([r.max_power for r in ok]))
        result.slope, result.intercept = float(fit.slope), float(fit.intercept)
        result.r_squared = float(fit.rvalue ** 2)
    write_json(Path(spec.outputs) / "comparison.json", result.to_dict())
    return result
