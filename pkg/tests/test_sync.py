from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrp_forge.model import InputError
from jrp_forge.sync import (
    CapExceeded,
    SeriesFamily,
    check_cardinality_identities,
    hyperperiod,
    ijr,
    ijr_cross_seed,
    ijr_enumerate,
    lcm_rational,
    ujr,
    ujr_enumerate,
)

from .oracles import enum_intersection_rate, enum_union_rate

F = Fraction


def test_lcm_rational():
    assert lcm_rational(F(1, 2), F(1, 3)) == F(1)
    assert lcm_rational(F(2), F(3)) == F(6)
    assert lcm_rational(F(3, 4), F(5, 6)) == F(15, 2)


def test_hyperperiod_nested():
    assert hyperperiod([[F(2), F(3)], [F(4)]]) == F(12)


def test_ujr_hand_values():
    assert ujr([F(2), F(3)]) == F(2, 3)          # 1/2 + 1/3 - 1/6
    assert ujr([F(2), F(4)]) == F(1, 2)          # 4 absorbed by 2
    assert ujr([F(5)]) == F(1, 5)
    assert ujr([F(1, 2), F(1, 3)]) == F(4)       # rates add on the scaled grid
    assert ujr([F(2), F(2), F(2)]) == F(1, 2)    # duplicates are one series


def test_ijr_hand_values():
    assert ijr([[F(2)], [F(3)]]) == F(1, 6)
    assert ijr([[F(2), F(3)], [F(5)]]) == F(1, 10) + F(1, 15) - F(1, 30)
    assert ijr([[F(2)], [F(2)]]) == F(1, 2)


def test_single_family_ijr_is_ujr():
    fam = [F(2), F(3), F(5)]
    assert ijr([fam]) == ujr(fam)


def test_enumerate_matches_closed_form():
    fams = [[F(2), F(3)], [F(4), F(5)]]
    assert ujr_enumerate([q for fam in fams for q in fam]) == ujr(
        [q for fam in fams for q in fam])
    assert ijr_enumerate(fams) == ijr(fams)


periods = st.integers(min_value=1, max_value=30).map(F)
seeds = st.fractions(min_value=F(1, 50), max_value=F(3), max_denominator=50)


@settings(max_examples=300, derandomize=True, deadline=None)
@given(st.lists(periods, min_size=1, max_size=6), seeds)
def test_ujr_matches_set_oracle(ints, seed):
    series = [p * seed for p in ints]
    assert ujr(series) == enum_union_rate(series)


@settings(max_examples=200, derandomize=True, deadline=None)
@given(st.lists(st.lists(periods, min_size=1, max_size=3),
                min_size=2, max_size=3), seeds)
def test_ijr_matches_set_oracle(fams, seed):
    series = [[p * seed for p in fam] for fam in fams]
    assert ijr(series) == enum_intersection_rate(series)


@settings(max_examples=150, derandomize=True, deadline=None)
@given(st.lists(st.lists(periods, min_size=1, max_size=3),
                min_size=2, max_size=4))
def test_cardinality_identities_hold(fams):
    report = check_cardinality_identities([SeriesFamily(tuple(f)) for f in fams])
    assert report.ok, report.violations()


def test_cardinality_identities_need_enough_families():
    with pytest.raises(InputError):
        check_cardinality_identities([SeriesFamily((F(2),))], which=2)


def test_cap_exceeded_and_override():
    # 21 pairwise non-dividing smooth numbers; saturation pruning keeps the
    # raised-cap run fast
    nums = (4, 6, 9, 10, 14, 15, 21, 22, 25, 26, 33, 34, 35, 38, 39, 46,
            49, 51, 55, 57, 58)
    series = [F(p) for p in nums]
    with pytest.raises(CapExceeded):
        ujr(series)
    val = ujr(series, cap=21)
    assert F(1, 4) < val < sum(F(1, p) for p in nums)


def test_enumerate_cap():
    with pytest.raises(CapExceeded):
        ujr_enumerate([F(2), F(999983)], max_points=10)


def test_positivity_required():
    with pytest.raises(InputError):
        ujr([F(0)])
    with pytest.raises(InputError):
        ijr([[F(2)], [F(-1)]])


# --- cross-seed rate ---------------------------------------------------------

def test_cross_seed_equal_seeds():
    value, q, r = ijr_cross_seed(F(3, 2), F(3, 2))
    assert (value, q, r) == (F(2, 3), 0, 1)


def test_cross_seed_known_value():
    # beta_j/beta_i = 1 + 1/3 -> shared epochs every beta_i*(3+1)
    value, q, r = ijr_cross_seed(F(1), F(4, 3))
    assert (q, r) == (1, 3)
    assert value == F(1, 4)
    # straight enumeration over the scaled grid agrees
    assert enum_intersection_rate([[F(1)], [F(4, 3)]]) == value


def test_cross_seed_rejects_bad_order():
    with pytest.raises(InputError):
        ijr_cross_seed(F(2), F(1))
    with pytest.raises(InputError):
        ijr_cross_seed(F(0), F(1))
    with pytest.raises(InputError):
        ijr_cross_seed(F(1, 2), F(1))  # seeds below 1 are out of scope


@settings(max_examples=300, derandomize=True, deadline=None)
@given(st.integers(min_value=1, max_value=60), st.integers(min_value=1, max_value=60),
       st.fractions(min_value=F(1), max_value=F(3), max_denominator=20))
def test_cross_seed_matches_oracle(q_raw, r_raw, beta_i):
    ratio = 1 + F(q_raw, r_raw)
    value, q, r = ijr_cross_seed(beta_i, beta_i * ratio)
    assert F(q, r) == F(q_raw, r_raw)
    assert value == enum_intersection_rate([[beta_i], [beta_i * ratio]])


@settings(max_examples=400, derandomize=True, deadline=None)
@given(st.integers(min_value=1, max_value=200))
def test_cross_seed_below_drift_bound(r):
    # with drift q/r the shared rate 1/(r+q) stays under q/r
    for q in range(1, r + 1):
        if F(q, r).denominator != r:
            continue
        value, _, _ = ijr_cross_seed(F(1), 1 + F(q, r))
        assert value < F(q, r)
