"""Brute-force reference values for small instances.

``dual_lp_oracle`` solves the dual linear program of any of the metrics by
dynamic programming over a grid of test-function values. Positions are first
snapped to the grid. The snapped program has integral gaps and integral
bounds, and its constraint matrix is an interval (difference) matrix, so its
optimum is attained on the grid and the DP is exact for it. Snapping moves
each atom by at most ``h/2`` and every metric here uses 1-Lipschitz test
functions, so the answer is within ``h/2 * sum|a_k|`` of the true optimum
(the public tolerance ``h * sum|a_k|`` leaves a factor of two to spare).

``transport_oracle_w1`` is the primal side: the monotone coupling of two
sorted measures of equal mass, which is optimal on the line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d

from .measure import DiscreteMeasure, SignedAtomList

__all__ = [
    "DualConstraintSpec",
    "OracleError",
    "InstanceTooLarge",
    "MassMismatch",
    "FLAT_SPEC",
    "W1_SPEC",
    "CENTRALIZED_SPEC",
    "dual_lp_oracle",
    "oracle_tolerance",
    "transport_oracle_w1",
    "TransportPlan",
]

DEFAULT_CAP = 16


class OracleError(ValueError):
    pass


class InstanceTooLarge(OracleError):
    pass


class MassMismatch(OracleError):
    pass


@dataclass(frozen=True)
class DualConstraintSpec:
    """Constraints on the test function ``f`` besides ``Lip(f) <= 1``.

    ``bound_all``: ``|f| <= B`` everywhere. ``anchor``: ``(x*, lo, hi)`` with
    ``f(x*)`` in ``[lo, hi]``; an ``x*`` of ``None`` means the first atom.
    """

    bound_all: float | None = None
    anchor: tuple[float | None, float, float] | None = None
    lipschitz_constant: float = 1.0

    def __post_init__(self):
        if self.bound_all is None and self.anchor is None:
            raise ValueError("need bound_all or anchor, otherwise the program is unbounded")
        if self.lipschitz_constant != 1.0:
            raise ValueError("only unit Lipschitz constant is supported")


FLAT_SPEC = DualConstraintSpec(bound_all=1.0)
W1_SPEC = DualConstraintSpec(anchor=(None, 0.0, 0.0))
CENTRALIZED_SPEC = DualConstraintSpec(anchor=(0.0, -1.0, 1.0))


def oracle_tolerance(delta: SignedAtomList, h: float) -> float:
    return h * float(np.abs(delta.masses).sum())


def _snap(v: float, h: float) -> int:
    return int(round(v / h))


def dual_lp_oracle(
    delta: SignedAtomList,
    spec: DualConstraintSpec,
    h: float = 1e-3,
    cap: int = DEFAULT_CAP,
) -> float:
    """Maximise ``|sum_k a_k f(x_k)|`` over grid-valued 1-Lipschitz ``f``."""
    if h <= 0:
        raise ValueError("grid step must be positive")
    n = len(delta)
    if n > cap:
        raise InstanceTooLarge(f"{n} atoms exceeds the oracle cap of {cap}")
    if n == 0:
        return 0.0

    x = delta.positions
    a = delta.masses
    anchor_idx = None
    if spec.anchor is not None:
        ax, alo, ahi = spec.anchor
        if ax is None:
            anchor_idx = 0
        else:
            anchor_idx = int(np.searchsorted(x, ax))
            if anchor_idx == n or x[anchor_idx] != ax:
                x = np.insert(x, anchor_idx, ax)
                a = np.insert(a, anchor_idx, 0.0)

    grid_x = np.array([_snap(v, h) for v in x], dtype=np.int64)
    steps = np.diff(grid_x)

    if spec.bound_all is not None:
        lo_i = -int(math.floor(spec.bound_all / h + 1e-9))
        hi_i = -lo_i
    else:
        # an anchored 1-Lipschitz f never leaves anchor range +- diameter
        span = int(grid_x[-1] - grid_x[0])
        lo_i = _snap(spec.anchor[1], h) - span
        hi_i = _snap(spec.anchor[2], h) + span
    if anchor_idx is not None:
        a_lo = max(lo_i, int(math.ceil(spec.anchor[1] / h - 1e-9)))
        a_hi = min(hi_i, int(math.floor(spec.anchor[2] / h + 1e-9)))
    values = np.arange(lo_i, hi_i + 1) * h

    best = -math.inf
    for sign in (1.0, -1.0):
        score = sign * a[0] * values
        if anchor_idx == 0:
            score = _restrict(score, a_lo - lo_i, a_hi - lo_i)
        for k in range(1, len(a)):
            r = int(steps[k - 1])
            if r > 0:
                score = maximum_filter1d(score, size=2 * r + 1, mode="constant", cval=-np.inf)
            score = score + sign * a[k] * values
            if anchor_idx == k:
                score = _restrict(score, a_lo - lo_i, a_hi - lo_i)
        best = max(best, float(score.max()))
    return best


def _restrict(score: np.ndarray, lo: int, hi: int) -> np.ndarray:
    out = np.full_like(score, -np.inf)
    out[lo : hi + 1] = score[lo : hi + 1]
    return out


@dataclass(frozen=True)
class TransportPlan:
    cost: float
    flows: list[tuple[float, float, float]]  # (source position, target position, mass)


def transport_oracle_w1(
    mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float | None = None
) -> TransportPlan:
    """North-west-corner coupling of two equal-mass measures and its cost."""
    m_mu = float(mu.masses.sum()) if len(mu) else 0.0
    m_nu = float(nu.masses.sum()) if len(nu) else 0.0
    if tol is None:
        tol = 1e-12 * (m_mu + m_nu + 1.0)
    if abs(m_mu - m_nu) > tol:
        raise MassMismatch(f"total masses differ: {m_mu!r} vs {m_nu!r}")

    xs, ms = mu.positions.tolist(), mu.masses.tolist()
    ys, ns = nu.positions.tolist(), nu.masses.tolist()
    i = j = 0
    left_i = ms[0] if ms else 0.0
    left_j = ns[0] if ns else 0.0
    flows: list[tuple[float, float, float]] = []
    cost = 0.0
    while i < len(xs) and j < len(ys):
        moved = min(left_i, left_j)
        if moved > 0 and xs[i] != ys[j]:
            flows.append((xs[i], ys[j], moved))
            cost += moved * abs(xs[i] - ys[j])
        left_i -= moved
        left_j -= moved
        # rounding leftovers below tol are dropped with the exhausted side
        if left_i <= tol:
            i += 1
            left_i = ms[i] if i < len(xs) else 0.0
        if left_j <= tol:
            j += 1
            left_j = ns[j] if j < len(ys) else 0.0
    return TransportPlan(cost, flows)
