"""Command-line front end: optimize | simulate | sweep | lifetime | stark | rank.

Exit codes: 0 success, 1 usage or I/O error, 2 computation-level failure
(non-convergence, nonquadratic Stark regime, ...).  All outputs are
deterministic for a given config and seed; timestamp header lines can be
suppressed with --no-timestamp for byte-identical reruns.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import staterank
from .atomic.defects import load_series_table
from .atomic.lifetimes import lifetime_scan, write_lifetime_csv
from .atomic.radial import WavefunctionCache
from .atomic.stark import polarisability, stark_map, write_stark_csv
from .errors import (ConfigError, NonQuadraticRegimeError, PulseFormatError,
                     RydgateError)
from .fidelity import evaluate, format_report, sweep, write_sweep_csv
from .optimizer import (CostWeights, OptimizationProblem, multistart_solve,
                        problem_preset, PRESET_NAMES)
from .pulses import (GateConfig, default_sr61_config, load_pulse, save_pulse,
                     write_pulse_csv)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2

_GATE_KEYS = {"omega_max", "gamma", "c6", "distance_r"}
_PROBLEM_KEYS = {"horizon", "n_steps", "delta_bound",
                 "include_delta_robustness", "enforce_zero_endpoints",
                 "constraint_tol", "target_phase"}
_WEIGHT_KEYS = {"q_sens_omega", "q_sens_delta", "q_phase", "q_pop", "q_tr",
                "r_domega", "r_ddelta"}
_RANK_KEYS = {"n_anchor", "omega_max_anchor", "c6_anchor", "distance_r",
              "series_label", "decay_series", "temperature_k", "n_min",
              "n_max"}
_TOP_KEYS = {"gate", "problem", "weights", "rank", "defect_data"}


def _check_keys(section, allowed, where):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys in {where}: {sorted(unknown)}; "
                          f"allowed: {sorted(allowed)}")


class RunConfig:
    """Strictly parsed key-value configuration for all commands."""

    def __init__(self, doc: dict | None = None):
        doc = doc or {}
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a JSON object")
        _check_keys(doc, _TOP_KEYS, "top level")
        gate = dict(doc.get("gate", {}))
        _check_keys(gate, _GATE_KEYS, "gate")
        base = default_sr61_config()
        self.gate = GateConfig(
            omega_max=float(gate.get("omega_max", base.omega_max)),
            gamma=float(gate.get("gamma", base.gamma)),
            c6=float(gate.get("c6", base.c6)),
            distance_r=float(gate.get("distance_r", base.distance_r)))

        self.problem_overrides = dict(doc.get("problem", {}))
        _check_keys(self.problem_overrides, _PROBLEM_KEYS, "problem")
        self.weight_overrides = dict(doc.get("weights", {}))
        _check_keys(self.weight_overrides, _WEIGHT_KEYS, "weights")

        rank = dict(doc.get("rank", {}))
        _check_keys(rank, _RANK_KEYS, "rank")
        self.rank_overrides = rank
        self.defect_data_path = doc.get("defect_data")

    def problem(self, preset: str) -> OptimizationProblem:
        prob = problem_preset(preset)
        if self.weight_overrides:
            prob = replace(prob, weights=replace(prob.weights,
                                                 **self.weight_overrides))
        if self.problem_overrides:
            prob = replace(prob, **self.problem_overrides)
        return prob

    def series_table(self):
        return load_series_table(self.defect_data_path)

    def rank_config(self) -> staterank.RankConfig:
        ov = dict(self.rank_overrides)
        n_lo = int(ov.pop("n_min", 40))
        n_hi = int(ov.pop("n_max", 120))
        if "decay_series" in ov:
            ov["decay_series"] = tuple(ov["decay_series"])
        return staterank.RankConfig(n_axis=tuple(range(n_lo, n_hi + 1)),
                                    series_table=self.series_table(), **ov)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig(doc)


def _timestamp(args) -> str | None:
    if args.no_timestamp:
        return None
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _parse_axis(spec: str) -> np.ndarray:
    """Parse 'lo:hi:count' into a linspace axis."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"axis {spec!r} must be lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError("axis count must be >= 1")
    return np.linspace(lo, hi, count)


def _parse_range(spec: str) -> range:
    """Parse 'lo:hi' (inclusive) into a range of n values."""
    parts = spec.split(":")
    if len(parts) != 2:
        raise ConfigError(f"range {spec!r} must be lo:hi")
    lo, hi = int(parts[0]), int(parts[1])
    if hi < lo:
        raise ConfigError("range upper bound below lower bound")
    return range(lo, hi + 1)


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if args.preset not in PRESET_NAMES:
        print(f"error: unknown preset {args.preset!r}; available: "
              f"{', '.join(PRESET_NAMES)}", file=sys.stderr)
        return EXIT_USAGE
    problem = cfg.problem(args.preset)
    report = multistart_solve(problem, cfg.gate, n_starts=args.starts,
                              seed=args.seed)
    if not report.converged:
        print("not converged; per-start violations:", file=sys.stderr)
        for i, v in enumerate(report.per_start_violations):
            print(f"  start {i}: {v:.3e}", file=sys.stderr)
        return EXIT_COMPUTE
    save_pulse(report.pulse, args.out)
    noiseless = evaluate(report.pulse, cfg.gate.without_decay())
    f_plus = evaluate(report.pulse, cfg.gate, d_omega=0.05)
    f_minus = evaluate(report.pulse, cfg.gate, d_omega=-0.05)
    text = [
        f"preset {args.preset}, seed {args.seed}, {args.starts} starts "
        f"(best start seed {report.seed})",
        f"converged: outer={report.outer_iterations} "
        f"inner={report.inner_iterations} violation={report.violation:.3e} "
        f"cost={report.cost:.6g}",
        f"noiseless 1-F = {1.0 - noiseless.f:.3e}, phi = {noiseless.phi:.9f}, "
        f"p_tot = {noiseless.p_tot:.9f}",
        f"with decay: F(0) = {report.fidelity_zero_offset.f:.6f}, "
        f"F(+0.05) = {f_plus.f:.6f}, F(-0.05) = {f_minus.f:.6f}",
        f"t_bar_r = {report.fidelity_zero_offset.t_bar_r:.4f} / Omega_max",
        f"pulse written to {args.out}",
    ]
    print("\n".join(text))
    if args.report:
        with open(args.report, "w") as fh:
            fh.write("\n".join(text) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    pulse = load_pulse(args.pulse)
    gate = cfg.gate.without_decay() if args.no_decay else cfg.gate
    report = evaluate(pulse, gate, d_omega=args.delta_omega,
                      d_delta=args.delta_delta)
    print(format_report(report))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    pulse = load_pulse(args.pulse)
    grid = sweep(pulse, cfg.gate, _parse_axis(args.omega_axis),
                 _parse_axis(args.delta_axis))
    write_sweep_csv(grid, args.out, timestamp=_timestamp(args))
    print(f"{grid.values.shape[0]}x{grid.values.shape[1]} sweep written "
          f"to {args.out}; min F = {grid.values.min():.6f}")
    return EXIT_OK


def cmd_lifetime(args) -> int:
    cfg = load_config(args.config)
    table = cfg.series_table()
    series = table[args.series]
    finals = [table[lab] for lab in args.decay_series.split(",")]
    scan = lifetime_scan(series, list(_parse_range(args.n_range)),
                         args.temperature, finals,
                         cache=WavefunctionCache())
    write_lifetime_csv(scan, args.out, timestamp=_timestamp(args),
                       header_note=f"series {args.series}, "
                                   f"T = {args.temperature:g} K")
    print(f"1/tau = A n*^-2 + B n*^-3 with A = {scan.fit_a:.6g} 1/s, "
          f"B = {scan.fit_b:.6g} 1/s; max relative residual "
          f"{scan.residuals.max():.3%}")
    print(f"table written to {args.out}")
    return EXIT_OK


def cmd_stark(args) -> int:
    cfg = load_config(args.config)
    table = cfg.series_table()
    fields_v_m = _parse_axis(args.fields) * 0.1     # mV/cm -> V/m
    cache = WavefunctionCache()
    smap = stark_map(table, args.series, args.n, fields_v_m, cache=cache)
    fit = polarisability(table, args.series, args.n, fields_v_m, cache=cache)
    write_stark_csv(smap, args.out, timestamp=_timestamp(args))
    print(f"alpha_s = {fit.alpha_au:.6g} a.u. (R^2 = {fit.r_squared:.6f}); "
          f"map written to {args.out}")
    return EXIT_OK


def cmd_rank(args) -> int:
    cfg = load_config(args.config)
    pulse = load_pulse(args.pulse)
    rank_cfg = cfg.rank_config()
    engine = staterank.RankEngine(rank_cfg)
    code = EXIT_OK
    for e in args.fields_mv_cm:
        rows = staterank.fidelity_vs_n(pulse, rank_cfg, e, engine)
        out = args.out if len(args.fields_mv_cm) == 1 else (
            args.out.replace(".csv", f"_E{e:g}.csv") if args.out.endswith(".csv")
            else f"{args.out}_E{e:g}")
        staterank.write_rank_csv(rows, out, e, timestamp=_timestamp(args))
        best = max(rows, key=lambda r: (r.fidelity, -r.n))
        print(f"E = {e:g} mV/cm: argmax n = {best.n}, F = {best.fidelity:.6f} "
              f"-> {out}")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydgate",
        description="Robust Rydberg CZ pulses and Sr atomic-property scans")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; computations are deterministic and "
                             "single-process")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="suppress timestamp header lines in outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="synthesize a pulse from a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="fidelity report for a pulse file")
    p.add_argument("pulse")
    p.add_argument("--delta-omega", type=float, default=0.0)
    p.add_argument("--delta-delta", type=float, default=0.0)
    p.add_argument("--no-decay", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="fidelity grid over control offsets")
    p.add_argument("pulse")
    p.add_argument("--omega-axis", default="-0.05:0.05:41")
    p.add_argument("--delta-axis", default="-0.02:0.02:41")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lifetime", help="lifetime scan with scaling fit")
    p.add_argument("--series", default="3S1")
    p.add_argument("--n-range", default="40:120")
    p.add_argument("--temperature", type=float, default=300.0)
    p.add_argument("--decay-series", default="3P0,3P1,3P2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lifetime)

    p = sub.add_parser("stark", help="Stark map and polarisability for one level")
    p.add_argument("--series", default="3S1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fields", default=None,
                   help="lo:hi:count in mV/cm (default: auto quadratic range)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stark)

    p = sub.add_parser("rank", help="fidelity vs n at stray-field values")
    p.add_argument("pulse")
    p.add_argument("fields_mv_cm", nargs="+", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "stark" and args.fields is None:
            # auto axis needs the series table; resolve here for simplicity
            cfg = load_config(args.config)
            table = cfg.series_table()
            from .atomic.stark import default_field_axis
            fields = default_field_axis(table, args.series, args.n)
            args.fields = f"{fields[0] * 10:.9g}:{fields[-1] * 10:.9g}:{fields.size}"
        return args.func(args)
    except NonQuadraticRegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ConfigError, PulseFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RydgateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
