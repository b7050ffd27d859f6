"""Command-line front end.

    flatmetric dist A.txt B.txt --metric flat [--backend tree]
    flatmetric bench --n 20k,40k --reps 3 --dist clustered --backend array,tree --seed 0
    flatmetric approx --source "uniform 0 1 1" --n 4 --out mu.txt [--midpoint]
    flatmetric selftest [--cap 12] [--cases 500] [--h 1e-3] [--seed 0]

Exit codes: 0 ok, 1 selftest failure, 2 unreadable measure file,
3 invalid arguments, 4 backends disagree during bench.
"""
from __future__ import annotations

import argparse
import shlex
import sys
from typing import Sequence

from .bench import CSV_HEADER, BackendMismatch, BenchConfig, parse_sizes, run_bench
from .discretize import InvalidCdf, discretize, step_source, table_source, uniform_source
from .flat import flat_distance
from .measure import MeasureError, ParseError, radon_distance, read_measure, write_measure
from .selftest import CHECKS, SelftestConfig, run_selftest
from .wasserstein import (
    DistanceValue,
    centralized_w1,
    flat_upper_bound,
    normalized_w1,
    w1_distance,
)

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_PARSE = 2
EXIT_USAGE = 3
EXIT_MISMATCH = 4

METRICS = {
    "w1": w1_distance,
    "w1-normalized": normalized_w1,
    "w1-centralized": centralized_w1,
    "flat-upper": flat_upper_bound,
    "radon": lambda mu, nu: DistanceValue(radon_distance(mu, nu), "radon"),
}
METRIC_NAMES = ("w1", "w1-normalized", "w1-centralized", "flat", "flat-upper", "radon")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatmetric", description="Wasserstein-type distances on the real line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="distance between two measure files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--metric", required=True, choices=METRIC_NAMES)
    p.add_argument("--backend", choices=("array", "tree"), help="flat metric only (default: tree)")

    p = sub.add_parser("bench", help="timing sweep, CSV on stdout")
    p.add_argument("--n", required=True, help="comma-separated sizes, k/M suffixes allowed")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--dist", default="clustered", choices=("clustered", "spread"))
    p.add_argument("--backend", default="array,tree")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("approx", help="discretize a measure on an interval")
    p.add_argument(
        "--source",
        required=True,
        help="'uniform A B MASS', 'step FILE [A B]' or 'table FILE'",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--midpoint", action="store_true", help="cell midpoints instead of right endpoints")

    p = sub.add_parser("selftest", help="randomized oracle cross-checks")
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--cases", type=int, default=500)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".", help="where counterexample files go")
    return parser


def cmd_dist(args, out) -> int:
    if args.backend is not None and args.metric != "flat":
        raise UsageError("--backend only applies to --metric flat")
    mu = read_measure(args.file_a)
    nu = read_measure(args.file_b)
    if args.metric == "flat":
        result = flat_distance(mu, nu, backend=args.backend or "tree")
    else:
        result = METRICS[args.metric](mu, nu)
    print(result.format(), file=out)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    try:
        cfg = BenchConfig(
            sizes=parse_sizes(args.n),
            reps=args.reps,
            distribution=args.dist,
            backends=[b.strip() for b in args.backend.split(",") if b.strip()],
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(CSV_HEADER, file=out)
    try:
        for rec in run_bench(cfg):
            print(rec.csv(), file=out, flush=True)
    except BackendMismatch as exc:
        print(f"flatmetric bench: backend mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _source_from_spec(spec: str):
    parts = shlex.split(spec)
    if not parts:
        raise UsageError("empty --source")
    kind, rest = parts[0], parts[1:]
    try:
        if kind == "uniform" and len(rest) == 3:
            a, b, mass = map(float, rest)
            return uniform_source(a, b, mass)
        if kind == "step" and len(rest) in (1, 3):
            bounds = tuple(map(float, rest[1:])) if len(rest) == 3 else (None, None)
            return step_source(rest[0], *bounds)
        if kind == "table" and len(rest) == 1:
            return table_source(rest[0])
    except ValueError as exc:
        if isinstance(exc, (MeasureError, InvalidCdf)):
            raise
        raise UsageError(f"bad --source {spec!r}: {exc}") from None
    raise UsageError(f"bad --source {spec!r}; expected 'uniform A B MASS', 'step FILE [A B]' or 'table FILE'")


def cmd_approx(args, out) -> int:
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    source = _source_from_spec(args.source)
    mu = discretize(source, args.n, midpoint=args.midpoint)
    placement = "midpoint" if args.midpoint else "right endpoint"
    write_measure(mu, args.out, header=f"{args.n} cells, {placement}, source: {args.source}")
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    try:
        cfg = SelftestConfig(cap=args.cap, cases=args.cases, h=args.h, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_selftest(cfg)
    for name in CHECKS:
        print(f"{name:20s} {report.counts[name]}", file=out)
    if report.ok:
        print(f"selftest passed: {report.total} checks", file=out)
        return EXIT_OK
    fail = report.failure
    pa, pb = fail.write(args.out_dir)
    print(f"selftest FAILED: {fail.check}: {fail.detail}", file=out)
    print(f"counterexample written to {pa} and {pb}", file=out)
    return EXIT_SELFTEST


COMMANDS = {"dist": cmd_dist, "bench": cmd_bench, "approx": cmd_approx, "selftest": cmd_selftest}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"flatmetric {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"flatmetric {args.command}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MeasureError, ValueError) as exc:
        print(f"flatmetric {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE if args.command in ("dist", "approx") else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
