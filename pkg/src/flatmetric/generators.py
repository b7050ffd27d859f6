"""Random measure pairs for benchmarks and randomized checks.

Recipe: ``n`` atoms with masses i.i.d. uniform on (0, 1], each assigned to
``mu`` or ``nu`` by a fair coin. Positions are i.i.d. uniform on [-1, 1]
(``clustered``) or have consecutive gaps ``2 + U(0, 1)`` (``spread``), so
that no two atoms interact through the flat metric's unit bound.
"""
from __future__ import annotations

import numpy as np

from .measure import DiscreteMeasure

__all__ = ["DISTRIBUTIONS", "random_atoms", "random_pair", "equal_mass_pair"]

DISTRIBUTIONS = ("clustered", "spread")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_atoms(n: int, distribution: str = "clustered", seed=None) -> tuple[np.ndarray, np.ndarray]:
    rng = _rng(seed)
    if distribution == "clustered":
        x = rng.uniform(-1.0, 1.0, n)
    elif distribution == "spread":
        x = -1.0 + np.cumsum(2.0 + rng.uniform(0.0, 1.0, n))
    else:
        raise ValueError(f"unknown distribution {distribution!r}; choose from {DISTRIBUTIONS}")
    m = 1.0 - rng.uniform(0.0, 1.0, n)  # (0, 1]
    return x, m


def random_pair(
    n: int, distribution: str = "clustered", seed=None
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    rng = _rng(seed)
    x, m = random_atoms(n, distribution, rng)
    to_mu = rng.random(n) < 0.5
    mu = DiscreteMeasure.from_arrays(x[to_mu], m[to_mu])
    nu = DiscreteMeasure.from_arrays(x[~to_mu], m[~to_mu])
    return mu, nu


def equal_mass_pair(
    n: int, distribution: str = "clustered", seed=None
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Like :func:`random_pair` but ``nu`` is rescaled to the mass of ``mu``.

    Both sides get at least one atom when ``n >= 2``.
    """
    rng = _rng(seed)
    while True:
        mu, nu = random_pair(n, distribution, rng)
        if len(mu) and len(nu) or n < 2:
            break
    if not len(mu) or not len(nu):
        return mu, mu
    return mu, nu * (mu.total_mass / nu.total_mass)
