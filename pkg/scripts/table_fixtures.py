"""Every metric on the pair (2 delta_x, 3 delta_y) for a few separations."""
import argparse

from flatmetric import (
    canonicalize,
    centralized_w1,
    flat_distance,
    flat_upper_bound,
    normalized_w1,
    radon_distance,
    w1_distance,
)

METRICS = [
    ("w1", lambda a, b: w1_distance(a, b).value),
    ("normalized", lambda a, b: normalized_w1(a, b).value),
    ("centralized", lambda a, b: centralized_w1(a, b).value),
    ("flat", lambda a, b: flat_distance(a, b).value),
    ("flat-upper", lambda a, b: flat_upper_bound(a, b).value),
    ("radon", radon_distance),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x", type=float, default=0.0)
    ap.add_argument("--y", type=float, nargs="+", default=[0.2, 0.5, 1.0, 2.0, 5.0])
    args = ap.parse_args(argv)

    print("y".rjust(6) + "".join(name.rjust(13) for name, _ in METRICS))
    mu = canonicalize([(args.x, 2.0)])
    for y in args.y:
        nu = canonicalize([(y, 3.0)])
        print(f"{y:6g}" + "".join(f"{f(mu, nu):13.6g}" for _, f in METRICS))


if __name__ == "__main__":
    main()
