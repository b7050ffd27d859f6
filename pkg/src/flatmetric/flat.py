"""Flat (bounded-Lipschitz) distance between discrete measures.

For ``mu - nu = sum_k a_k delta_{x_k}`` the best partial sum with the test
function pinned at the last atom,

    V_m(y) = a_m * y + sup { V_{m-1}(z) : |z - y| <= x_m - x_{m-1}, |z| <= 1 },

is concave and piecewise linear on [-1, 1], and the distance is its maximum
after the last atom. The absolute value in the dual definition is dropped:
the constraint set is symmetric under ``f -> -f``.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .backends import BACKENDS, get_backend
from .envelope import ConcaveEnvelope
from .measure import DiscreteMeasure, SignedAtomList, difference
from .wasserstein import DistanceValue

__all__ = ["flat_distance", "flat_signed", "DEFAULT_BACKEND"]

DEFAULT_BACKEND = "tree"

TraceHook = Callable[[int, ConcaveEnvelope], None]


def flat_signed(
    delta: SignedAtomList,
    backend: str = DEFAULT_BACKEND,
    trace: TraceHook | None = None,
    debug: bool = False,
) -> float:
    """Flat norm of a signed atom list.

    ``trace(k, envelope)`` is called after atom ``k`` (1-based) has been
    folded in. ``debug`` checks the envelope invariants at every step and
    raises :class:`~flatmetric.envelope.EnvelopeInvariantError` on failure.
    Either option switches to the step-wise (slower) path.
    """
    cls = get_backend(backend)
    if len(delta) == 0:
        return 0.0
    x, a = delta.positions, delta.masses
    if trace is None and not debug:
        return max(cls.run(x, a), 0.0)

    env = cls(len(x) + 2)
    for k in range(len(x)):
        if k > 0:
            env.max_filter(x[k] - x[k - 1])
            env.clip_to_unit()
        env.add_linear(a[k])
        if debug or trace is not None:
            snap = env.snapshot()
            if debug:
                snap.check(max_segments=k + 2)
            if trace is not None:
                trace(k + 1, snap)
    return max(env.supremum(), 0.0)


def flat_distance(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    backend: str = DEFAULT_BACKEND,
    trace: TraceHook | None = None,
    debug: bool = False,
) -> DistanceValue:
    """Flat distance ``sup { |int f d(mu - nu)| : |f| <= 1, Lip(f) <= 1 }``.

    ``backend`` is ``"tree"`` (O(n log n)) or ``"array"`` (O(n^2)); both give
    the same value up to rounding.
    """
    value = flat_signed(difference(mu, nu), backend=backend, trace=trace, debug=debug)
    return DistanceValue(value, "flat", backend)
