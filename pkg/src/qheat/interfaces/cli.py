#!/usr/bin/env python3
"""
Unified CLI for qheat.

Subcommands:
    derive          Derived circuit parameters from a parameter file
    spectral dump   Memory kernel, noise PSDs and G0 on the frequency grid
    greens solve    Sideband coefficient table for one drive state
    engine curve    Dissipation curve, stationary points, thresholds, max power
    engine evolve   Amplitude/phase envelope time series
    engine thermo   Heat flow and efficiency at the max-power point
    engine cycle    Otto-cycle trajectory at one amplitude
    sweep run       One-parameter sweep (temperature, gap, filter_q, noise_model)
    oracle run      Time-domain ensemble against the frequency-domain targets

Usage:
    qheat derive --params params/table1.json
    qheat engine curve --params params/table1.json --out out/ --threads 8
    qheat sweep run --kind temperature --values 0.1 0.2 0.3 --out out/temperature

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from ..circuit import derive_parameters, effective_frequency
from ..constants import AMPLITUDE_MAX, AMPLITUDE_POINTS, CYCLE_SAMPLES, ORACLE_SAMPLES, PHI0
from ..errors import ConfigError, QHeatError
from ..models import CircuitParameters, DriveState, SolverOptions, SweepSpec

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = "params/table1.json"


# =============================================================================
# HELPERS
# =============================================================================


def _load(args):
    params = CircuitParameters.from_file(args.params)
    return params, derive_parameters(params)


def _options(args) -> SolverOptions:
    try:
        return SolverOptions(
            model=args.model,
            base_divisions=args.base_divisions,
            fine_divisions=args.fine_divisions,
            n_max=None if args.n_max in (None, "auto") else int(args.n_max),
            check_convergence=args.check_convergence,
            workers=args.threads,
        )
    except ValueError as e:
        raise ConfigError(f"Invalid solver options: {e}") from e


def _drive(A_b: float, theta_b: float = 0.0) -> DriveState:
    try:
        return DriveState(A_b=A_b, theta_b=theta_b)
    except ValueError as e:
        raise ConfigError(f"Invalid drive state: {e}") from e


def _out(args) -> Path:
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _gamma_b(args, omega_b: float) -> float:
    if args.q_b is not None:
        if args.q_b <= 0:
            raise ConfigError("--q-b must be positive")
        return omega_b / args.q_b
    return args.gamma_b


def _fmt(value: Optional[float], spec: str = ".4g") -> str:
    if value is None:
        return "-"
    return "inf" if math.isinf(value) else format(value, spec)


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_derive(args):
    """Print derived parameters and write derived.json."""
    from ..sweep import write_json

    _, derived = _load(args)
    two_pi = 2.0 * math.pi
    print("Derived parameters")
    print("=" * 60)
    print(f"  phi_g0 / Phi0         {derived.phi_g0 / PHI0:.4f}")
    print(f"  L_J                   {derived.L_J * 1e9:.4f} nH")
    print(f"  N_L                   {derived.N_L:.5f}")
    for name in ("a", "s", "h", "c", "b"):
        omega = getattr(derived, "omega_" + name)
        print(f"  omega_{name} / 2pi         {omega / two_pi / 1e9:.4f} GHz")
    print(f"  omega_a'(0) / 2pi     {effective_frequency(derived, 0.0) / two_pi / 1e9:.4f} GHz")
    print(f"  alpha_ha, alpha_ca    {derived.alpha_ha:.4f}, {derived.alpha_ca:.4f}")
    print(f"  alpha_h, alpha_c      {derived.alpha_h:.4f}, {derived.alpha_c:.4f}")
    print(f"  g_s^2, g_b^2          {derived.g_s_sq:.4e}, {derived.g_b_sq:.4e}")
    if args.out:
        path = write_json(_out(args) / "derived.json", derived.to_dict())
        print(f"\nWrote {path}")


def cmd_spectral_dump(args):
    """Tabulate K, S and G0 on the frequency grid."""
    from ..spectral import build_grid, resonance_peaks, spectral_tables, static_greens
    from ..sweep import write_csv

    _, derived = _load(args)
    options = _options(args)
    grid = build_grid(derived, options)
    tables = spectral_tables(derived, grid, options.model)
    frame = pd.DataFrame(tables.columns(derived, args.phi_b))
    path = write_csv(_out(args) / "spectral.csv", frame)
    peaks = resonance_peaks(grid.points, static_greens(derived, args.phi_b, grid.points))
    print(f"Grid: {len(grid)} points up to {grid.omega_max:.4e} rad/s")
    print("Peaks of |Im G0| (GHz): " + ", ".join(f"{p / 2 / math.pi / 1e9:.3f}" for p in peaks[:5]))
    print(f"Wrote {path}")


def cmd_greens_solve(args):
    """Solve the sideband table for one drive state."""
    from ..greens import solve_sidebands
    from ..spectral import build_grid
    from ..sweep import write_csv

    _, derived = _load(args)
    options = _options(args)
    grid = build_grid(derived, options)
    drive = _drive(args.A_b, args.theta_b)
    greens = solve_sidebands(derived, drive, grid, options.n_max, workers=options.workers)
    orders = greens.orders
    frame = pd.DataFrame({
        "omega": np.repeat(grid.points, len(orders)),
        "n": np.tile(orders, len(grid)),
        "re": greens.coefficients.real.ravel(),
        "im": greens.coefficients.imag.ravel(),
    })
    path = write_csv(_out(args) / "greens.csv", frame)
    print(f"n_max={greens.n_max}  residual={greens.residual_norm:.2e}  "
          f"tail={greens.tail_ratio:.2e}  fallback={greens.fallback}")
    print(f"Wrote {path}")


def _curve(args, derived, options):
    from ..slowdyn import PressureEvaluator, amplitude_grid, dissipation_curve

    evaluator = PressureEvaluator(derived, options)
    amplitudes = amplitude_grid(args.points, args.a_max)
    gamma_b = _gamma_b(args, derived.omega_b)
    return evaluator, dissipation_curve(derived, amplitudes, gamma_b, options,
                                        evaluator=evaluator)


def cmd_engine_curve(args):
    """Dissipation curve with stationary points, thresholds and max power."""
    from ..slowdyn import max_power, power_curve, q_thresholds
    from ..sweep import write_csv, write_json

    _, derived = _load(args)
    options = _options(args)
    _, curve = _curve(args, derived, options)
    q_init, q_stop = q_thresholds(derived, curve)
    best = max_power(derived, curve)
    out = _out(args)
    write_csv(out / "curve.csv", curve.to_frame())
    write_csv(out / "power.csv",
              pd.DataFrame([p.to_dict() for p in power_curve(derived, curve)],
                           columns=["Q_b", "A_b", "gamma_b", "power"]))
    summary = curve.summary()
    summary.update(Q_init=q_init, Q_stop=q_stop,
                   max_power=best.to_dict() if best else None)
    write_json(out / "curve.json", summary)

    print(f"Stationary points ({len(curve.stationary_points)}):")
    for p in curve.stationary_points:
        print(f"  A_b={p.A_b:.5f}  {p.kind:8s}  slope={p.slope:.3e}")
    print(f"Q_init={_fmt(q_init)}  Q_stop={_fmt(q_stop)}")
    if best:
        print(f"Max power {best.power * 1e18:.4g} aW at Q_b={best.Q_b:.4g}, A_b={best.A_b:.4g}")
    else:
        print("No admissible stable point")


def cmd_engine_evolve(args):
    """Integrate the amplitude/phase envelope."""
    from ..slowdyn import integrate_amplitude_phase
    from ..sweep import write_csv

    _, derived = _load(args)
    options = _options(args)
    gamma_b = _gamma_b(args, derived.omega_b)
    trajectory = integrate_amplitude_phase(
        derived, _drive(args.A0, args.theta0), gamma_b, args.t_end,
        options=options, samples=args.samples,
    )
    path = write_csv(_out(args) / "evolve.csv", trajectory.to_frame())
    print(f"A_b: {args.A0:.5g} -> {trajectory.A_b[-1]:.5g} over {args.t_end:.3g} s "
          f"({trajectory.evaluations} pressure evaluations)")
    print(f"Wrote {path}")


def cmd_engine_thermo(args):
    """Heat flow and efficiency at the max-power operating point."""
    from ..slowdyn import max_power, power_curve
    from ..sweep import write_json
    from ..thermo import heat_flow

    _, derived = _load(args)
    options = _options(args)
    args.gamma_b, args.q_b = 0.0, None
    evaluator, curve = _curve(args, derived, options)
    best = max_power(derived, curve)
    stable = [p.A_b for p in power_curve(derived, curve)]
    report = heat_flow(derived, evaluator.grid, options.model,
                       power=best.power if best else None, amplitudes=stable,
                       options=options)
    path = write_json(_out(args) / "thermo.json", report.to_dict())
    print(f"Q_h={report.Q_dot_h:.4e} W  Q_c={report.Q_dot_c:.4e} W  "
          f"balance={report.balance:.2e} W")
    print(f"eta={_fmt(report.efficiency)}  eta_C={report.eta_carnot:.4f}  "
          f"eta_O=[{_fmt(report.eta_otto_min)}, {_fmt(report.eta_otto_max)}]")
    print(f"Wrote {path}")


def cmd_engine_cycle(args):
    """Otto-cycle trajectory at one amplitude."""
    from ..sweep import write_csv, write_json
    from ..thermo import otto_trajectory

    _, derived = _load(args)
    _drive(args.A_b)
    cycle = otto_trajectory(derived, args.A_b, args.samples, options=_options(args))
    out = _out(args)
    write_csv(out / "cycle.csv", cycle.to_frame())
    write_json(out / "cycle.json", cycle.summary())
    print(f"loop area {cycle.loop_area:.4e} rad/s, work/cycle {cycle.work_per_cycle:.4e} J, "
          f"eta_O {cycle.eta_otto:.3f}")


def cmd_sweep_run(args):
    """Run (or resume) a parameter sweep."""
    from ..sweep import run_classical_comparison, run_sweep

    if args.spec:
        spec = SweepSpec.from_file(args.spec)
    else:
        if not args.kind or not args.values:
            raise ConfigError("give --spec, or --kind together with --values")
        try:
            spec = SweepSpec(kind=args.kind, values=args.values, base=args.params,
                             outputs=args.out, parallelism=args.threads, model=args.model,
                             amplitude_points=args.points, amplitude_max=args.a_max,
                             options=_options(args).model_copy(update={"workers": 1}))
        except ValueError as e:
            raise ConfigError(f"Invalid sweep: {e}") from e

    if args.compare_classical:
        result = run_classical_comparison(spec)
        records = result.quantum + result.classical
        print(f"classical fit: slope={result.slope:.4e} W/K  R^2={result.r_squared:.4f}")
    else:
        records = run_sweep(spec)

    print(f"{'value':>10s} {'model':>9s} {'P_max [aW]':>11s} {'Q_b':>9s} {'eta':>9s} "
          f"{'Q_init':>9s} {'Q_stop':>9s}")
    for r in records:
        if r.error:
            print(f"{r.value:10.4g} {r.model:>9s}  failed: {r.error}")
            continue
        print(f"{r.value:10.4g} {r.model:>9s} {r.max_power * 1e18:11.4g} {_fmt(r.Q_b_at_max):>9s} "
              f"{_fmt(r.efficiency):>9s} {_fmt(r.Q_init):>9s} {_fmt(r.Q_stop):>9s}")


def cmd_oracle_run(args):
    """Time-domain ensemble against its frequency-domain target."""
    from ..oracle import driven_ensemble, linear_ensemble, sample_traces
    from ..sweep import write_csv, write_json

    _, derived = _load(args)
    options = _options(args)
    if args.regime == "linear":
        name, points = "phi_b", args.phi_b
    else:
        name, points = "A_b", [_drive(a, args.theta_b).A_b for a in args.A_b]
    common = dict(n_samples=args.samples, model=options.model, base_seed=args.seed,
                  workers=options.workers, options=options)
    if args.regime == "linear":
        reports = [linear_ensemble(derived, phi_b=phi, seeds=args.seeds, **common)
                   for phi in points]
    else:
        reports = [driven_ensemble(derived, A_b=a, theta_b=args.theta_b, seeds=args.seeds,
                                   **common)
                   for a in points]
    path = write_json(_out(args) / f"oracle_{args.regime}.json",
                      [r.to_dict() for r in reports])
    if args.traces:
        for value in points:
            frame = sample_traces(derived, args.regime, value, args.theta_b, args.samples,
                                  args.seed, options.model)
            trace_path = _out(args) / "traces" / f"{args.regime}_{name}={value:g}.csv"
            write_csv(trace_path, frame)
            print(f"Wrote {trace_path}")
    for r in reports:
        where = f"phi_b={r.phi_b}" if r.kind == "linear" else f"A_b={r.A_b}"
        print(f"{r.kind:7s} {where:14s} target=({r.target_re:.4e}, {r.target_im:.4e}) "
              f"estimate=({r.estimate_re:.4e}, {r.estimate_im:.4e}) "
              f"rel.err={r.relative_error:.3f} {'ok' if r.passed else 'FAIL'}")
    print(f"Wrote {path}")


# =============================================================================
# PARSER
# =============================================================================


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", default=DEFAULT_PARAMS, help="Parameter file (JSON)")
    common.add_argument("--out", default="out", help="Output directory")
    common.add_argument("--threads", type=int, default=1, help="Worker threads/processes")
    common.add_argument("--seed", type=int, default=0, help="Base random seed")
    common.add_argument("--model", choices=["quantum", "classical"], default="quantum")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--base-divisions", type=int, default=SolverOptions().base_divisions)
    common.add_argument("--fine-divisions", type=int, default=SolverOptions().fine_divisions)
    common.add_argument("--n-max", default="auto", help="Sideband truncation or 'auto'")
    common.add_argument("--check-convergence", action="store_true",
                        help="Repeat quadratures on a refined grid")
    return common


def _curve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", type=int, default=AMPLITUDE_POINTS, help="Amplitude samples")
    p.add_argument("--a-max", type=float, default=AMPLITUDE_MAX, help="Largest amplitude")


def _loss_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--gamma-b", type=float, default=0.0, help="Intrinsic loss (rad/s)")
    group.add_argument("--q-b", type=float, default=None, help="Intrinsic quality factor")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qheat",
        description="qheat quasiclassical autonomous superconducting heat engine",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # --- derive ---
    p = subparsers.add_parser("derive", parents=[common], help="Derived parameters")
    p.set_defaults(func=cmd_derive)

    # --- spectral dump ---
    p_spectral = subparsers.add_parser("spectral", help="Spectral functions")
    sp = p_spectral.add_subparsers(dest="action")
    p = sp.add_parser("dump", parents=[common], help="Tabulate K, S, G0")
    p.add_argument("--phi-b", type=float, default=0.0, help="Static slow-mode flux for G0")
    p.set_defaults(func=cmd_spectral_dump)

    # --- greens solve ---
    p_greens = subparsers.add_parser("greens", help="Sideband Green's functions")
    sp = p_greens.add_subparsers(dest="action")
    p = sp.add_parser("solve", parents=[common], help="Solve the sideband table")
    p.add_argument("--A-b", dest="A_b", type=float, required=True)
    p.add_argument("--theta-b", dest="theta_b", type=float, default=0.0)
    p.set_defaults(func=cmd_greens_solve)

    # --- engine ---
    p_engine = subparsers.add_parser("engine", help="Engine analysis")
    sp = p_engine.add_subparsers(dest="action")
    p = sp.add_parser("curve", parents=[common], help="Dissipation curve")
    _curve_args(p)
    _loss_args(p)
    p.set_defaults(func=cmd_engine_curve)

    p = sp.add_parser("evolve", parents=[common], help="Envelope time series")
    p.add_argument("--A0", type=float, required=True, help="Initial amplitude")
    p.add_argument("--theta0", type=float, default=0.0, help="Initial phase")
    p.add_argument("--t-end", type=float, required=True, help="End time (s)")
    p.add_argument("--samples", type=int, default=1000)
    _loss_args(p)
    p.set_defaults(func=cmd_engine_evolve)

    p = sp.add_parser("thermo", parents=[common], help="Heat flow and efficiency")
    _curve_args(p)
    p.set_defaults(func=cmd_engine_thermo)

    p = sp.add_parser("cycle", parents=[common], help="Otto-cycle trajectory")
    p.add_argument("--A-b", dest="A_b", type=float, required=True)
    p.add_argument("--samples", type=int, default=CYCLE_SAMPLES)
    p.set_defaults(func=cmd_engine_cycle)

    # --- sweep run ---
    p_sweep = subparsers.add_parser("sweep", help="Parameter sweeps")
    sp = p_sweep.add_subparsers(dest="action")
    p = sp.add_parser("run", parents=[common], help="Run or resume a sweep")
    p.add_argument("--spec", help="Sweep specification (JSON)")
    p.add_argument("--kind", choices=["temperature", "gap", "filter_q", "noise_model"])
    p.add_argument("--values", type=float, nargs="+")
    p.add_argument("--compare-classical", action="store_true",
                   help="Run both noise models and fit classical power vs T_h")
    _curve_args(p)
    p.set_defaults(func=cmd_sweep_run)

    # --- oracle run ---
    p_oracle = subparsers.add_parser("oracle", help="Time-domain validation")
    sp = p_oracle.add_subparsers(dest="action")
    p = sp.add_parser("run", parents=[common], help="Run an oracle ensemble")
    p.add_argument("--regime", choices=["linear", "driven"], default="linear")
    p.add_argument("--phi-b", type=float, nargs="+", default=[0.0])
    p.add_argument("--A-b", dest="A_b", type=float, nargs="+", default=[0.2])
    p.add_argument("--theta-b", dest="theta_b", type=float, default=0.0)
    p.add_argument("--seeds", type=int, default=32)
    p.add_argument("--samples", type=int, default=ORACLE_SAMPLES)
    p.add_argument("--traces", action="store_true",
                   help="Also write one realisation per point as CSV")
    p.set_defaults(func=cmd_oracle_run)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the qheat CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not getattr(args, "func", None):
        parser.print_help()
        return 0

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except QHeatError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
