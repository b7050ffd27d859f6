"""Doubling experiment for the two flat-distance backends.

    python scripts/scaling_study.py --sizes 20k,40k,80k,160k --reps 8 --csv timings.csv

Prints the mean time per size and the time ratio per doubling. A quadratic
method approaches 4, a linear or n log n one stays near 2.
"""
import argparse
import sys

from flatmetric.bench import CSV_HEADER, BenchConfig, doubling_ratios, parse_sizes, run_bench
from flatmetric.generators import DISTRIBUTIONS


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="20k,40k,80k,160k")
    ap.add_argument("--reps", type=int, default=8)
    ap.add_argument("--dist", default="clustered,spread", help="comma-separated subset of %s" % (DISTRIBUTIONS,))
    ap.add_argument("--backend", default="array,tree")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write every timing row here")
    args = ap.parse_args(argv)

    rows = []
    for dist in args.dist.split(","):
        cfg = BenchConfig(
            sizes=parse_sizes(args.sizes),
            reps=args.reps,
            distribution=dist,
            backends=args.backend.split(","),
            seed=args.seed,
        )
        recs = []
        for rec in run_bench(cfg):
            recs.append(rec)
            print(f"  {dist:9s} {rec.backend:5s} n={rec.n:<8d} {rec.seconds:.4f}s", file=sys.stderr)
        rows += recs
        for backend in cfg.backends:
            ratios = doubling_ratios(recs, backend)
            print(f"{dist:9s} {backend:5s} " + "  ".join(f"x{n}: {r:.2f}" for n, r in ratios))

    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            fh.writelines(r.csv() + "\n" for r in rows)


if __name__ == "__main__":
    main()
