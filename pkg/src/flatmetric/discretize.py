"""Replace a measure on an interval by atoms with a certified W1 error.

Cutting ``[a, b]`` into ``n`` equal cells and putting each cell's mass at its
right endpoint moves no mass further than one cell width, hence

    W1(mu, mu_n) <= (b - a) * |mu| / n,

and the flat distance obeys the same bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .measure import DiscreteMeasure, MeasureError, read_measure

__all__ = [
    "IntervalMeasureSource",
    "InvalidCdf",
    "discretize",
    "discretization_error_bound",
    "uniform_source",
    "step_source",
    "table_source",
]


class InvalidCdf(MeasureError):
    pass


@dataclass(frozen=True)
class IntervalMeasureSource:
    """A finite measure on ``[a, b]`` given by ``cdf(x) = mu[a, x)``.

    ``total`` is the full mass including any atom sitting at ``b``.
    ``exact`` optionally carries an atomic representation of the same
    measure, for error checks.
    """

    cdf: Callable[[float], float]
    interval: tuple[float, float]
    total: float
    exact: DiscreteMeasure | None = field(default=None, compare=False)

    def __post_init__(self):
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError(f"invalid interval [{a}, {b}]")
        if not (math.isfinite(self.total) and self.total >= 0):
            raise InvalidCdf(f"total mass must be finite and non-negative, got {self.total}")

    def spot_check(self, samples: int = 65) -> None:
        a, b = self.interval
        xs = np.linspace(a, b, samples)
        vals = np.array([self.cdf(float(x)) for x in xs])
        tol = 1e-12 * (1.0 + abs(self.total))
        if not np.all(np.isfinite(vals)):
            raise InvalidCdf("cdf returned non-finite values")
        if abs(vals[0]) > tol:
            raise InvalidCdf(f"cdf(a) = {vals[0]!r}, expected 0")
        if np.any(np.diff(vals) < -tol):
            raise InvalidCdf("cdf is not non-decreasing")
        if vals[-1] > self.total + tol:
            raise InvalidCdf("cdf exceeds the total mass")


def discretize(source: IntervalMeasureSource, n: int, midpoint: bool = False) -> DiscreteMeasure:
    """``n`` atoms at the right cell endpoints carrying each cell's mass.

    Cells are ``[t_{i-1}, t_i)``; the last one is closed so mass at ``b`` is
    kept. ``midpoint=True`` places atoms at cell centres instead, which halves
    the error bound but is not the right-endpoint construction.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    source.spot_check()
    a, b = source.interval
    edges = np.array([a + (b - a) * i / n for i in range(n + 1)])
    cum = np.array([source.cdf(float(t)) for t in edges[1:-1]] + [source.total])
    cum = np.concatenate(([0.0], cum))
    masses = np.diff(cum)
    tol = 1e-12 * (1.0 + abs(source.total))
    if np.any(masses < -tol):
        raise InvalidCdf("cdf decreases between grid points")
    masses = np.maximum(masses, 0.0)
    where = 0.5 * (edges[:-1] + edges[1:]) if midpoint else edges[1:]
    return DiscreteMeasure.from_arrays(where, masses)


def discretization_error_bound(source: IntervalMeasureSource, n: int, midpoint: bool = False) -> float:
    a, b = source.interval
    bound = (b - a) * source.total / n
    return bound / 2 if midpoint else bound


# --- built-in sources --------------------------------------------------------


def uniform_source(a: float, b: float, mass: float = 1.0) -> IntervalMeasureSource:
    def cdf(x: float) -> float:
        return mass * min(max((x - a) / (b - a), 0.0), 1.0)

    return IntervalMeasureSource(cdf, (a, b), mass)


def step_source(
    atoms: DiscreteMeasure | str | Path, a: float | None = None, b: float | None = None
) -> IntervalMeasureSource:
    """Atomic measure seen through its cdf ``x -> mu[a, x)``.

    The interval defaults to the atoms' hull, widened by one unit when that is
    a single point.
    """
    mu = atoms if isinstance(atoms, DiscreteMeasure) else read_measure(atoms)
    if len(mu) == 0 and (a is None or b is None):
        raise InvalidCdf("an empty step source needs an explicit interval")
    lo = float(mu.positions[0]) if a is None else a
    hi = float(mu.positions[-1]) if b is None else b
    if hi <= lo:
        hi = lo + 1.0
    if len(mu) and (mu.positions[0] < lo or mu.positions[-1] > hi):
        raise InvalidCdf(f"atoms lie outside [{lo}, {hi}]")
    xs = mu.positions
    cum = np.concatenate(([0.0], np.cumsum(mu.masses)))

    def cdf(x: float) -> float:
        return float(cum[np.searchsorted(xs, x, side="left")])

    return IntervalMeasureSource(cdf, (lo, hi), float(cum[-1]), exact=mu)


def table_source(path: str | Path) -> IntervalMeasureSource:
    """Piecewise-linear cdf through the ``x F(x)`` rows of a two-column file."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        body = line.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 2:
            raise InvalidCdf(f"{path}:{lineno}: expected '<x> <F(x)>'")
        try:
            rows.append((float(body[0]), float(body[1])))
        except ValueError:
            raise InvalidCdf(f"{path}:{lineno}: not a number") from None
    if len(rows) < 2:
        raise InvalidCdf(f"{path}: need at least two rows")
    xs = np.array([r[0] for r in rows])
    fs = np.array([r[1] for r in rows])
    if np.any(np.diff(xs) <= 0):
        raise InvalidCdf(f"{path}: x column must be strictly increasing")
    if np.any(np.diff(fs) < 0):
        raise InvalidCdf(f"{path}: cdf column must be non-decreasing")
    fs = fs - fs[0]

    def cdf(x: float) -> float:
        return float(np.interp(x, xs, fs))

    return IntervalMeasureSource(cdf, (float(xs[0]), float(xs[-1])), float(fs[-1]))
