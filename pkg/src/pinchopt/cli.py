"""Command-line entry point: ``pinchopt solve | sweep | validate``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from . import experiments
from .channel import ScenarioConfig
from .placement import METHODS, PsoConfig, place
from .scenario import (
    ConfigError,
    InfeasibleParameterError,
    Scenario,
    UserDefaults,
    default_scenario,
    load_config,
    parse_methods,
)
from .validation import run_validate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4
EXIT_IO = 1


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _methods(text: str) -> tuple[str, ...]:
    try:
        return parse_methods(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pinchopt", description="Robust power allocation and pinching-antenna placement.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI scenario file (defaults: 5 random users)")
    common.add_argument("--seed", type=_u64, default=None, help="random seed (u64)")
    common.add_argument("--methods", type=_methods, default=None, help=f"comma-separated subset of {','.join(METHODS)}")
    common.add_argument("--grid-step", type=float, default=None, metavar="METERS", help="exhaustive search step")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--bits-per-joule", action="store_true", help="report EE in bit/J instead of (bit/s/Hz)/W")

    s = sub.add_parser("solve", parents=[common], help="place the antenna and allocate power for one scenario")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", parents=[common], help="average EE over random scenarios along one parameter")
    w.add_argument("--variable", choices=experiments.SWEEP_VARIABLES, required=True)
    w.add_argument("--values", type=_floats, default=(), help="comma-separated, strictly increasing")
    w.add_argument("--trials", type=int, default=100, help="scenario trials per sweep point")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--gnuplot", metavar="PATH", help="also write gnuplot data blocks")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="cross-check the analytical model against quadrature and Monte Carlo")
    v.add_argument("--level", choices=("quick", "full"), default="quick")
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--trials", type=int, default=None, help="Monte Carlo samples (default by level)")
    v.add_argument("--r-min-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return p


def _scenario(args) -> Scenario:
    if args.config:
        scen = load_config(args.config)
    else:
        scen = default_scenario(args.seed or 0)
    if args.seed is not None:
        scen = replace(scen, pso=replace(scen.pso, seed=args.seed))
    if args.methods:
        scen = replace(scen, methods=args.methods)
    if args.grid_step is not None:
        if not (0 < args.grid_step < scen.cfg.waveguide_length):
            raise InfeasibleParameterError(f"--grid-step must lie in (0, L), got {args.grid_step}")
        scen = replace(scen, grid_step=args.grid_step)
    return scen


def _emit(text: str, path) -> None:
    if path:
        experiments.write_text(path, text)
    else:
        sys.stdout.write(text)


def _num(x: float):
    return x if math.isfinite(x) else None


def cmd_solve(args) -> int:
    scen = _scenario(args)
    scale = scen.cfg.bandwidth if args.bits_per_joule else 1.0
    unit = "bit/J" if args.bits_per_joule else "(bit/s/Hz)/W"
    record = {"n_users": len(scen.users), "ee_unit": unit, "results": []}
    out = sys.stderr if not args.out else sys.stdout
    for method in scen.methods:
        res = place(method, scen.users, scen.cfg, pso=scen.pso, grid_step=scen.grid_step)
        a = res.allocation
        ee = a.energy_efficiency * scale
        print(f"{method:>10}: x_pin={res.x_pin:.6f} m  P_total={a.total_power:.6e} W  EE={ee:.6g} {unit}"
              f"  evals={res.evaluations}", file=out)
        record["results"].append({
            "method": method,
            "x_pin": res.x_pin,
            "total_power_w": a.total_power,
            "effective_sum_rate": a.effective_sum_rate,
            "energy_efficiency": _num(ee),
            "evaluations": res.evaluations,
            "converged": res.converged,
            "users": [{"l": u.l, "r_min": u.r_min, "p_min_w": u.p_min} for u in a.per_user],
        })
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scen = _scenario(args) if args.config else None
    try:
        spec = experiments.SweepSpec(
            variable=args.variable,
            values=args.values,
            scenario_trials=args.trials,
            seed=args.seed or 0,
            methods=args.methods or (scen.methods if scen else METHODS),
        )
    except ValueError as exc:
        raise InfeasibleParameterError(str(exc)) from None
    if args.workers < 1:
        raise InfeasibleParameterError("--workers must be >= 1")
    cfg = scen.cfg if scen else ScenarioConfig()
    base = UserDefaults(noise_power=cfg.noise_power)
    if scen:
        u = scen.users[0]
        base = UserDefaults(sigma2=u.sigma2, target_rate=u.target_rate, epsilon=u.epsilon, noise_power=u.noise_power)
    n_users = len(scen.users) if scen else 5
    pso = scen.pso if scen else PsoConfig()
    grid_step = args.grid_step or (scen.grid_step if scen else 0.01)
    rows = experiments.run_sweep(spec, cfg, base, n_users, pso, grid_step, workers=args.workers)
    scale = cfg.bandwidth if args.bits_per_joule else 1.0
    _emit(experiments.rows_to_csv(rows, scale), args.out)
    if args.gnuplot:
        experiments.write_text(args.gnuplot, experiments.rows_to_gnuplot(rows, scale))
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.trials is not None and args.trials < 10_000:
        raise InfeasibleParameterError("--trials must be >= 10000")
    rep = run_validate(args.level, args.seed, args.trials, args.r_min_scale, report=lambda c: print(c.line(), flush=True))
    print("validation", "passed" if rep.passed else "FAILED")
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleParameterError as exc:
        print(f"infeasible parameter: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
