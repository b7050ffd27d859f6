"""Timing sweeps for the two flat-distance backends."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .backends import get_backend
from .generators import DISTRIBUTIONS, random_pair
from .measure import difference

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "BackendMismatch",
    "CSV_HEADER",
    "run_bench",
    "doubling_ratios",
    "parse_sizes",
]

CSV_HEADER = "n,backend,distribution,seed,seconds,value"


class BackendMismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchRecord:
    n: int
    backend: str
    distribution: str
    seed: int
    seconds: float
    value: float

    def csv(self) -> str:
        return f"{self.n},{self.backend},{self.distribution},{self.seed},{self.seconds:.9g},{self.value:.17g}"


@dataclass
class BenchConfig:
    sizes: Sequence[int]
    reps: int = 1
    distribution: str = "clustered"
    backends: Sequence[str] = ("array", "tree")
    seed: int = 0
    rtol: float = 1e-9

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("need at least one instance size")
        if any(n < 1 for n in self.sizes):
            raise ValueError("instance sizes must be positive")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not self.backends:
            raise ValueError("need at least one backend")
        for b in self.backends:
            get_backend(b)


def instance_seed(base: int, rep: int) -> int:
    return base + rep


def run_bench(cfg: BenchConfig) -> Iterator[BenchRecord]:
    """Yield one record per (n, rep, backend), in that nesting order.

    Only the distance computation is timed. The first instance of every
    size gets one discarded warm-up call per backend. Raises
    :class:`BackendMismatch` when backends disagree on an instance.
    """
    for n in cfg.sizes:
        warmed: set[str] = set()
        for rep in range(cfg.reps):
            seed = instance_seed(cfg.seed, rep)
            mu, nu = random_pair(n, cfg.distribution, seed)
            delta = difference(mu, nu)
            x, a = delta.positions, delta.masses
            values = []
            for name in cfg.backends:
                run = get_backend(name).run
                if name not in warmed:
                    run(x, a)
                    warmed.add(name)
                t0 = time.perf_counter()
                value = max(run(x, a), 0.0) if len(x) else 0.0
                seconds = max(time.perf_counter() - t0, 1e-9)
                values.append(value)
                yield BenchRecord(n, name, cfg.distribution, seed, seconds, value)
            ref = values[0]
            for name, v in zip(cfg.backends, values):
                if abs(v - ref) > cfg.rtol * (1.0 + abs(ref)):
                    raise BackendMismatch(
                        f"n={n} seed={seed}: {cfg.backends[0]}={ref!r} but {name}={v!r}"
                    )


def doubling_ratios(records: Sequence[BenchRecord], backend: str) -> list[tuple[int, float]]:
    """Mean time at each size divided by the mean at the previous size."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        if r.backend == backend:
            by_n.setdefault(r.n, []).append(r.seconds)
    sizes = sorted(by_n)
    means = [float(np.mean(by_n[n])) for n in sizes]
    return [(sizes[i], means[i] / means[i - 1]) for i in range(1, len(sizes))]


def parse_sizes(text: str) -> list[int]:
    """``"1k,2k,1.6e5,1M"`` -> ``[1000, 2000, 160000, 1000000]``."""
    sizes = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        mult = 1
        if tok[-1] in "km":
            mult = 1000 if tok[-1] == "k" else 1_000_000
            tok = tok[:-1]
        value = float(tok) * mult
        if value != int(value) or value < 1:
            raise ValueError(f"invalid instance size {tok!r}")
        sizes.append(int(value))
    if not sizes:
        raise ValueError("empty size list")
    return sizes
