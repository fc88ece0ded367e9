"""Exact enumeration over deterministic plans.

Everything here is rational arithmetic over the eight plans (or the exact
quantum cos^2 values), computed directly from plan answers rather than
through strategy tables, so it can serve as ground truth for both the
analytic tables and the Monte Carlo harness.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    DEFAULT_ANGLES,
    SETTINGS,
    AngleSet,
    JointDistribution,
    Outcome,
    Plan,
    Prob,
    Setting,
    prob_to_json,
)

A, B, C = Setting.A, Setting.B, Setting.C
PLUS, MINUS = Outcome.PLUS, Outcome.MINUS

# Unordered pairs of distinct settings, and the cyclic order used by the
# original three-term inequality.
UNORDERED_PAIRS = ((A, B), (B, C), (C, A))


@dataclass(frozen=True)
class ExactStats:
    p_same_setting_match: Prob
    p_diff_setting_match: Prob
    bell_original_sums: tuple[Prob, Prob]
    per_plan: Mapping[Plan, Fraction] = field(default_factory=dict)
    exact: bool = True

    @property
    def p_diff(self) -> Prob:
        return 1 - self.p_diff_setting_match

    def to_json_obj(self) -> dict[str, object]:
        return {
            "exact": self.exact,
            "p_same_setting_match": prob_to_json(self.p_same_setting_match),
            "p_diff_setting_match": prob_to_json(self.p_diff_setting_match),
            "p_diff": prob_to_json(self.p_diff),
            "bell_original_sums": [prob_to_json(x) for x in self.bell_original_sums],
            "per_plan": {str(plan): prob_to_json(v) for plan, v in self.per_plan.items()},
        }


def enumerate_plans() -> list[Plan]:
    """All 2**3 plans, A varying slowest, PLUS before MINUS."""
    return [Plan(answers) for answers in itertools.product((PLUS, MINUS), repeat=3)]  # type: ignore[arg-type]


def plan_match_probability(plan: Plan) -> Fraction:
    """P(equal answers) when the two wings get different, uniformly chosen settings."""
    agreeing = sum(plan[s] is plan[t] for s, t in UNORDERED_PAIRS)
    return Fraction(agreeing, 3)


def derive_bell_bound() -> Fraction:
    return min(plan_match_probability(p) for p in enumerate_plans())


def _as_weights(weights: Sequence[Fraction | int | str] | Mapping[Plan, Fraction]) -> dict[Plan, Fraction]:
    plans = enumerate_plans()
    if isinstance(weights, Mapping):
        ws = {plan: Fraction(weights.get(plan, 0)) for plan in plans}
    else:
        if len(weights) != 8:
            raise ValueError(f"expected 8 plan weights, got {len(weights)}")
        ws = {plan: Fraction(w) for plan, w in zip(plans, weights)}
    if any(w < 0 for w in ws.values()):
        raise ValueError("plan weights must be nonnegative")
    if sum(ws.values()) != 1:
        raise ValueError(f"plan weights sum to {sum(ws.values())}, not 1")
    return ws


def exact_stats(weights: Sequence[Fraction | int | str] | Mapping[Plan, Fraction]) -> ExactStats:
    """Exact statistics of a plan mixture under uniform, independent settings."""
    ws = _as_weights(weights)
    per_plan = {plan: plan_match_probability(plan) for plan in ws}
    diff_match = sum((w * per_plan[plan] for plan, w in ws.items()), Fraction(0))
    plus_minus = sum(
        (w * sum(plan[s] is PLUS and plan[t] is MINUS for s, t in UNORDERED_PAIRS) for plan, w in ws.items()),
        Fraction(0),
    )
    minus_plus = sum(
        (w * sum(plan[s] is MINUS and plan[t] is PLUS for s, t in UNORDERED_PAIRS) for plan, w in ws.items()),
        Fraction(0),
    )
    return ExactStats(Fraction(1), diff_match, (plus_minus, minus_plus), per_plan)


def _exact_cos2(delta_deg: float) -> Fraction | None:
    reduced = math.fmod(delta_deg, 180.0) % 180.0
    if math.isclose(reduced, 180.0, abs_tol=1e-9):
        reduced = 0.0
    for angle, value in ((0.0, Fraction(1)), (60.0, Fraction(1, 4)), (120.0, Fraction(1, 4))):
        if math.isclose(reduced, angle, abs_tol=1e-9):
            return value
    return None


def exact_quantum_stats(angles: AngleSet = DEFAULT_ANGLES) -> ExactStats:
    """Singlet-analog statistics; exact when every angle difference is 0, 60 or 120 mod 180.

    Other angle sets fall back to floats with ``exact=False``.
    """
    deltas = {(s, t): angles[s] - angles[t] for s in SETTINGS for t in SETTINGS if s is not t}
    exact_vals = {pair: _exact_cos2(d) for pair, d in deltas.items()}
    if all(v is not None for v in exact_vals.values()):
        cos2: dict = exact_vals
        exact = True
    else:
        cos2 = {pair: math.cos(math.radians(d)) ** 2 for pair, d in deltas.items()}
        exact = False
    diff_match = sum(cos2.values()) / 6
    # p(+-|st) = p(-+|st) = sin^2/2 for the singlet analog
    orig = sum((1 - cos2[pair]) / 2 for pair in UNORDERED_PAIRS)
    same = Fraction(1) if exact else 1.0
    return ExactStats(same, diff_match, (orig, orig), {}, exact)


def exact_stats_from_joint(joint: JointDistribution) -> ExactStats:
    """Same summary computed from any full joint table (uniform settings assumed)."""
    if joint.missing_pairs:
        raise ValueError(f"joint table lacks pairs {joint.missing_pairs}")
    same = sum(joint[(s, s)][0] + joint[(s, s)][3] for s in SETTINGS) / 3
    diffs = [(s, t) for s in SETTINGS for t in SETTINGS if s is not t]
    diff_match = sum(joint[p][0] + joint[p][3] for p in diffs) / 6
    pm = sum(joint[p][1] for p in UNORDERED_PAIRS)
    mp = sum(joint[p][2] for p in UNORDERED_PAIRS)
    return ExactStats(same, diff_match, (pm, mp), {}, joint.exact)
