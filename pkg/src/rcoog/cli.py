"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 unstable system, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .bench import records_to_csv, run_bench, summarize, summary_to_csv
from .errors import RcoogError, SolverError
from .oracle import GridSpec, grid_rcoog, sigma_curve
from .solver import SolverConfig, compute_rcoog
from .sslib import read_plant
from .sysgen import write_batch

EXIT_INPUT = 2


class InputError(Exception):
    pass


def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--epsilon", type=float, default=d(1e-8), help="regularization (default 1e-8)")
    parser.add_argument("--tol-gamma", type=float, default=d(1e-4), help="relative tolerance (default 1e-4)")
    parser.add_argument("--seed", type=int, default=d(0), help="base seed for generators")
    parser.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    parser.add_argument("--out", default=d(None), help="output file or directory")


def _grid_flags(parser, n_points=10000):
    parser.add_argument("--omega-min", type=float, default=1e-4)
    parser.add_argument("--omega-max", type=float, default=1e4)
    parser.add_argument("--n-points", type=int, default=n_points)
    parser.add_argument("--no-zero", action="store_true", help="do not include omega = 0")


def _grid(args, refine=False):
    try:
        return GridSpec(args.omega_min, args.omega_max, args.n_points, not args.no_zero, refine)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcoog", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="compute the RCOOG of a plant file")
    p.add_argument("plant")
    p.add_argument("--max-iters", type=int, default=100)

    p = sub.add_parser("sweep", parents=[common], help="objective over a frequency grid")
    p.add_argument("plant")
    p.add_argument("--eps-list", default=None,
                   help="comma-separated regularizations (default: --epsilon)")
    _grid_flags(p, n_points=1000)

    p = sub.add_parser("bench", parents=[common], help="timing/accuracy harness")
    p.add_argument("--suite", choices=("random", "network"), default="random")
    p.add_argument("--sizes", default="5,10,25,50")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--summary", default=None, help="per-size aggregate CSV path")
    _grid_flags(p)

    p = sub.add_parser("gen", parents=[common], help="write generated plant files")
    p.add_argument("--suite", choices=("random", "network"), default="random")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("oracle", parents=[common], help="grid reference value")
    p.add_argument("plant")
    p.add_argument("--refine", action="store_true", help="local refinement around the argmax")
    p.add_argument("--csv", default=None, help="write omega,sigma_bar rows here")
    _grid_flags(p)
    return parser


def _emit(args, text):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args, **extra):
    try:
        return SolverConfig(epsilon=args.epsilon, tol_gamma=args.tol_gamma, **extra)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"not a list of integers: {text!r}") from None
    if not vals:
        raise InputError("empty size list")
    return vals


def cmd_compute(args):
    cfg = _config(args, max_iters=args.max_iters)
    plant = read_plant(args.plant)
    try:
        res = compute_rcoog(plant, cfg)
    except SolverError as exc:
        if exc.result is not None:
            print(f"best interval: [{exc.result.lower!r}, {exc.result.upper!r}]", file=sys.stderr)
        raise
    if args.json:
        text = json.dumps(res.as_dict(), indent=2) + "\n"
    else:
        text = (
            f"rcoog          {res.value:.10g}\n"
            f"interval       [{res.lower:.10g}, {res.upper:.10g})\n"
            f"peak frequency {res.peak_frequency:.6g} rad/s\n"
            f"iterations     {res.iterations}\n"
        )
    _emit(args, text)
    return 0


def cmd_sweep(args):
    raw = args.eps_list if args.eps_list is not None else repr(args.epsilon)
    try:
        eps_list = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad epsilon list {raw!r}") from None
    if not eps_list:
        raise InputError("empty epsilon list")
    if any(not e > 0 for e in eps_list):
        raise InputError("epsilon must be positive (only the regularized gain is supported)")
    grid = _grid(args)
    plant = read_plant(args.plant)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "sigma_bar", "epsilon"])
    for eps in eps_list:
        omegas, vals = sigma_curve(plant, eps, grid)
        for om, v in zip(omegas, vals):
            w.writerow([repr(float(om)), repr(float(v)), repr(eps)])
    _emit(args, buf.getvalue())
    return 0


def cmd_bench(args):
    cfg = _config(args)
    sizes = _int_list(args.sizes)
    if args.instances < 1:
        raise InputError("--instances must be >= 1")
    try:
        records = run_bench(args.suite, sizes, args.instances, args.seed, cfg, _grid(args))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(args, records_to_csv(records))
    summary = summary_to_csv(summarize(records))
    target = args.summary
    if target is None and args.out:
        out = Path(args.out)
        target = out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))
    if target:
        Path(target).write_text(summary, encoding="utf-8")
    else:
        sys.stderr.write(summary)
    return 0


def cmd_gen(args):
    if args.count < 1:
        raise InputError("--count must be >= 1")
    try:
        manifest = write_batch(args.out or ".", args.suite, args.size, args.count, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(manifest)
    return 0


def cmd_oracle(args):
    grid = _grid(args, refine=args.refine)
    plant = read_plant(args.plant)
    if not args.epsilon > 0:
        raise InputError("epsilon must be positive")
    value, omega = grid_rcoog(plant, args.epsilon, grid)
    if args.csv:
        omegas, vals = sigma_curve(plant, args.epsilon, grid)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["omega", "sigma_bar"])
            w.writerows([repr(float(a)), repr(float(b))] for a, b in zip(omegas, vals))
    if args.json:
        text = json.dumps({"value": value, "omega": omega}, indent=2) + "\n"
    else:
        text = f"grid rcoog {value:.10g} at omega={omega:.6g} rad/s\n"
    _emit(args, text)
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "gen": cmd_gen,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RcoogError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
