import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from flatmetric import (
    DistanceValue,
    DiscreteMeasure,
    centralized_w1,
    difference,
    flat_distance,
    flat_upper_bound,
    normalized_w1,
    scale_mass,
    total_mass,
    translate,
    w1_distance,
)
from flatmetric.generators import equal_mass_pair, random_pair
from flatmetric.oracle import CENTRALIZED_SPEC, W1_SPEC, dual_lp_oracle, transport_oracle_w1

from lp import dual_lp
from strategies import coords, delta, measures

EMPTY = DiscreteMeasure.empty()


def _w1_lp(mu, nu):
    d = difference(mu, nu)
    return dual_lp(d.positions, d.masses, fix=(0, 0.0)) if len(d) else 0.0


# --- w1 ---------------------------------------------------------------------


def test_w1_unequal_mass_is_infinite():
    assert w1_distance(delta(0, 2), delta(1, 3)).value == math.inf


def test_w1_unit_move():
    assert w1_distance(delta(0), delta(1)).value == 1.0


def test_w1_split_merge():
    mu, nu = delta(0) + delta(1), delta(0.5, 2)
    # frozen from the monotone plan (two half-unit moves of mass 1)
    assert transport_oracle_w1(mu, nu).cost == 1.0
    assert w1_distance(mu, nu).value == pytest.approx(1.0, rel=1e-12)


def test_w1_empty_cases():
    assert w1_distance(EMPTY, EMPTY).value == 0.0
    assert w1_distance(EMPTY, delta(0)).value == math.inf


def test_w1_mass_tolerance_absorbs_rounding():
    mu = DiscreteMeasure.from_arrays([0, 1, 2], [0.1, 0.2, 0.3])
    nu = DiscreteMeasure.from_arrays([0.5], [0.6])
    assert 0.1 + 0.2 + 0.3 != 0.6
    assert math.isfinite(w1_distance(mu, nu).value)


@given(measures(min_atoms=1), st.integers(1, 16).map(lambda k: k / 4), coords)
def test_w1_scale_and_translation(mu, lam, t):
    nu = translate(mu, 0.375) if len(mu) else mu
    base = w1_distance(mu, nu).value
    assert w1_distance(scale_mass(mu, lam), scale_mass(nu, lam)).value == pytest.approx(lam * base)
    assert w1_distance(translate(mu, t), translate(nu, t)).value == pytest.approx(base)


def test_w1_matches_lp(rng):
    for _ in range(50):
        mu, nu = equal_mass_pair(int(rng.integers(2, 9)), seed=rng)
        assert w1_distance(mu, nu).value == pytest.approx(_w1_lp(mu, nu), rel=1e-9, abs=1e-9)


# --- normalized -------------------------------------------------------------


@pytest.mark.parametrize("y, expected", [(1.0, 2.0), (0.2, 1.2), (5.0, 5.0)])
def test_normalized_table_row(y, expected):
    assert normalized_w1(delta(0, 2), delta(y, 3)).value == pytest.approx(expected, rel=1e-12)


def test_normalized_far_apart():
    mu, nu = delta(0), delta(10)
    transported = 0.0 + dual_lp_oracle(difference(mu, nu), W1_SPEC, h=1e-3)
    assert transported == pytest.approx(10.0)
    assert normalized_w1(mu, nu).value == min(2.0, transported) == 2.0


def test_normalized_empty():
    assert normalized_w1(EMPTY, delta(3, 2)).value == 2.0
    assert normalized_w1(EMPTY, EMPTY).value == 0.0


@given(measures(), measures(), measures())
def test_normalized_metric_axioms(mu, nu, eta):
    d = lambda p, q: normalized_w1(p, q).value
    assert d(mu, nu) == pytest.approx(d(nu, mu), abs=1e-12)
    assert d(mu, mu) == 0.0
    if mu != nu:
        assert d(mu, nu) > 0
    assert d(mu, eta) <= d(mu, nu) + d(nu, eta) + 1e-9


@given(measures(min_atoms=1), measures(min_atoms=1), st.floats(1e-6, 1.0))
def test_normalized_weak_scaling(mu, nu, lam):
    bound = lam * (total_mass(mu) + total_mass(nu))
    assert normalized_w1(scale_mass(mu, lam), scale_mass(nu, lam)).value <= bound * (1 + 1e-12)


def test_normalized_not_scale_equivariant():
    mu, nu = delta(0), delta(0.5, 2)
    assert normalized_w1(scale_mass(mu, 10), scale_mass(nu, 10)).value != pytest.approx(
        10 * normalized_w1(mu, nu).value
    )


# --- centralized ------------------------------------------------------------


def test_centralized_worked_example():
    mu, nu = delta(0.2, 2), delta(0.5, 3)
    d = difference(mu, nu)
    lp = dual_lp(d.positions, d.masses, anchor=(0.0, -1.0, 1.0))
    assert lp == pytest.approx(2.1, abs=1e-12)
    assert dual_lp_oracle(d, CENTRALIZED_SPEC, h=1e-3) == pytest.approx(2.1, abs=5e-3)
    assert centralized_w1(mu, nu).value == pytest.approx(2.1, rel=1e-12)


def test_centralized_identity():
    mu = delta(-0.3) + delta(0.4, 2)
    assert centralized_w1(mu, mu).value == 0.0


def test_centralized_matches_lp_with_negative_positions(rng):
    for _ in range(60):
        mu, nu = random_pair(int(rng.integers(1, 9)), seed=rng)
        mu, nu = scale_mass(mu, 2.0), translate(nu, 0.3)
        d = difference(mu, nu)
        lp = dual_lp(d.positions, d.masses, anchor=(0.0, -1.0, 1.0)) if len(d) else 0.0
        assert centralized_w1(mu, nu).value == pytest.approx(lp, rel=1e-9, abs=1e-9)


def test_centralized_with_atom_at_anchor():
    mu = delta(0, 2) + delta(0.5)
    nu = delta(-0.5, 1)
    d = difference(mu, nu)
    lp = dual_lp(d.positions, d.masses, anchor=(0.0, -1.0, 1.0))
    assert centralized_w1(mu, nu).value == pytest.approx(lp, rel=1e-12)


def test_centralized_equals_w1_on_equal_mass(rng):
    for _ in range(100):
        mu, nu = equal_mass_pair(int(rng.integers(1, 20)), seed=rng)
        assert centralized_w1(mu, nu).value == pytest.approx(w1_distance(mu, nu).value, rel=1e-9, abs=1e-12)


@given(measures(), measures(), st.integers(1, 16).map(lambda k: k / 4))
def test_centralized_scale_equivariant(mu, nu, lam):
    base = centralized_w1(mu, nu).value
    scaled = centralized_w1(scale_mass(mu, lam), scale_mass(nu, lam)).value
    assert scaled == pytest.approx(lam * base, rel=1e-12, abs=1e-12)


def test_centralized_not_translation_invariant():
    mu, nu = delta(0.2, 2), delta(0.5, 3)
    assert centralized_w1(translate(mu, 1), translate(nu, 1)).value != pytest.approx(
        centralized_w1(mu, nu).value
    )


# --- flat upper bound -------------------------------------------------------


def test_upper_equal_masses_is_w1(rng):
    for _ in range(30):
        mu, nu = equal_mass_pair(int(rng.integers(1, 10)), seed=rng)
        assert flat_upper_bound(mu, nu).value == pytest.approx(w1_distance(mu, nu).value, rel=1e-9)


def test_upper_table_pair():
    assert flat_upper_bound(delta(0, 2), delta(1, 3)).value == pytest.approx(3.0, rel=1e-12)
    assert flat_distance(delta(0, 2), delta(1, 3)).value == pytest.approx(3.0, rel=1e-12)


@pytest.mark.parametrize("x", [1.0, 10.0, 1e3, 1e6])
def test_upper_unbounded_while_flat_caps(x):
    assert flat_upper_bound(delta(0), delta(x)).value == pytest.approx(x)
    assert flat_distance(delta(0), delta(x)).value == pytest.approx(min(x, 2.0))


def test_upper_empty():
    assert flat_upper_bound(EMPTY, delta(1, 3)).value == 3.0
    assert flat_upper_bound(EMPTY, EMPTY).value == 0.0


@given(measures(), measures())
def test_upper_dominates_flat(mu, nu):
    assert flat_distance(mu, nu).value <= flat_upper_bound(mu, nu).value + 1e-9


@given(measures(), measures())
def test_upper_bounded_on_compact_set(mu, nu):
    # supports in [-2, 2]: half the diameter is 2, so the factor is 2 + 2
    assert flat_upper_bound(mu, nu).value <= 4.0 * flat_distance(mu, nu).value + 1e-9


# --- DistanceValue ----------------------------------------------------------


def test_distance_value_format():
    assert DistanceValue(3.0, "flat").format() == "3"
    assert DistanceValue(math.inf, "w1").format() == "inf"
    assert DistanceValue(0.1, "radon").format() == "0.10000000000000001"
    with pytest.raises(ValueError):
        DistanceValue(-1.0, "w1")
