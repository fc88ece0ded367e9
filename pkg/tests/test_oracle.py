from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eprb.core import AngleSet, Plan, PlanType, classify_plan
from eprb.oracle import (
    derive_bell_bound,
    enumerate_plans,
    exact_quantum_stats,
    exact_stats,
    exact_stats_from_joint,
    plan_match_probability,
)
from eprb.strategies import NonlocalDeterministicToy, QuantumSingletStrategy, quantum_distribution


def brute_match(plan):
    """Average over the six ordered different-setting pairs."""
    pairs = [(i, j) for i in range(3) for j in range(3) if i != j]
    return Fraction(sum(plan.answers[i] is plan.answers[j] for i, j in pairs), 6)


def test_enumeration_order_and_size():
    plans = enumerate_plans()
    assert [str(p) for p in plans] == ["+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"]
    assert len(set(plans)) == 8


def test_per_plan_match_values():
    values = [plan_match_probability(p) for p in enumerate_plans()]
    assert sorted(values, reverse=True) == [1, 1] + [Fraction(1, 3)] * 6
    for p in enumerate_plans():
        assert plan_match_probability(p) == brute_match(p)
        homogeneous = classify_plan(p) in (PlanType.ALL_PLUS, PlanType.ALL_MINUS)
        assert (plan_match_probability(p) == 1) == homogeneous


def test_bound():
    bound = derive_bell_bound()
    assert bound == Fraction(1, 3) and isinstance(bound, Fraction)


def test_uniform_mixture_stats():
    s = exact_stats([Fraction(1, 8)] * 8)
    assert s.p_diff_setting_match == Fraction(1, 2)
    assert s.p_diff == Fraction(1, 2)
    assert s.p_same_setting_match == 1
    # each ordered pair has p(+-) = 1/4 under the uniform mixture
    assert s.bell_original_sums == (Fraction(3, 4), Fraction(3, 4))


def test_point_mass_stats():
    s = exact_stats({Plan.parse("++-"): Fraction(1)})
    assert s.p_diff_setting_match == Fraction(1, 3)
    # +- on (B,C) only; -+ on (C,A) only
    assert s.bell_original_sums == (1, 1)


def test_weight_validation():
    with pytest.raises(ValueError):
        exact_stats([1] * 8)
    with pytest.raises(ValueError):
        exact_stats([Fraction(1, 2)] * 2)
    with pytest.raises(ValueError):
        exact_stats([2, -1, 0, 0, 0, 0, 0, 0])


@st.composite
def rational_mixtures(draw):
    denom = draw(st.integers(1, 64))
    cuts = sorted(draw(st.lists(st.integers(0, denom), min_size=7, max_size=7)))
    edges = [0, *cuts, denom]
    return [Fraction(edges[i + 1] - edges[i], denom) for i in range(8)]


@given(rational_mixtures())
@settings(max_examples=300)
def test_mixture_never_beats_bound(weights):
    s = exact_stats(weights)
    assert s.p_diff_setting_match >= Fraction(1, 3)
    assert max(s.bell_original_sums) <= 1
    expected = sum(w * brute_match(p) for w, p in zip(weights, enumerate_plans()))
    assert s.p_diff_setting_match == expected


def test_exact_quantum_stats():
    s = exact_quantum_stats()
    assert s.exact
    assert s.p_diff_setting_match == Fraction(1, 4)
    assert s.p_diff == Fraction(3, 4)
    assert s.bell_original_sums == (Fraction(9, 8), Fraction(9, 8))


def test_quantum_stats_other_angles_float():
    s = exact_quantum_stats(AngleSet(0, 45, 90))
    assert not s.exact
    # cos^2 of 45, 45, 90 differences: (1/2 + 1/2 + 0) / 3
    assert s.p_diff_setting_match == pytest.approx(1 / 3, abs=1e-12)


def test_quantum_oracle_agrees_with_strategy_table():
    via_table = exact_stats_from_joint(QuantumSingletStrategy().conditional_table().marginalize())
    via_distribution = exact_stats_from_joint(quantum_distribution())
    direct = exact_quantum_stats()
    for s in (via_table, via_distribution):
        assert s.p_diff_setting_match == direct.p_diff_setting_match
        assert s.bell_original_sums == direct.bell_original_sums
        assert s.p_same_setting_match == 1


def test_toy_oracle_stats():
    s = exact_stats_from_joint(NonlocalDeterministicToy().conditional_table().marginalize())
    assert s.p_diff_setting_match == Fraction(1, 4)


def test_json_rendering():
    obj = exact_quantum_stats().to_json_obj()
    assert obj["p_diff_setting_match"] == "1/4"
    assert obj["bell_original_sums"] == ["9/8", "9/8"]
