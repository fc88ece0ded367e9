import inspect
import math
from collections import Counter
from fractions import Fraction

import pytest
from scipy import stats

from eprb.core import OUTCOME_PAIRS, SETTING_PAIRS, HiddenState, Outcome, Plan, Setting, cell_index
from eprb.harness import run_experiment
from eprb.core import ExperimentConfig
from eprb.strategies import (
    ConditionalTable,
    DeterministicPlanStrategy,
    LocalResponder,
    LocalStochasticStrategy,
    NonlocalDeterministicToy,
    NonlocalResponder,
    NotWhiteBoxError,
    PlanMixtureStrategy,
    QuantumSingletStrategy,
    SignalingDemoStrategy,
    Strategy,
    StrategySpecError,
    parse_strategy,
    quantum_joint,
)
from eprb.streams import Role, Stream

from conftest import sigma

A, B, C = Setting.A, Setting.B, Setting.C
P, M = Outcome.PLUS, Outcome.MINUS
ALL_SPECS = ["plan:+-+", "mixture:uniform", "local-stochastic:1/2", "quantum", "nonlocal-det", "signaling"]


def src(i, seed=11):
    return Stream(seed, i, 0, Role.SOURCE)


# --- sample_hidden ----------------------------------------------------------------


def test_deterministic_plan_hidden_is_point_mass():
    plan = Plan.parse("+-+")
    s = DeterministicPlanStrategy(plan)
    assert {s.sample_hidden(src(i)).payload for i in range(100)} == {plan}


def test_uniform_mixture_hidden_chi_square():
    s = PlanMixtureStrategy()
    n = 100_000
    counts = Counter(str(s.sample_hidden(src(i)).payload) for i in range(n))
    assert len(counts) == 8
    _, pvalue = stats.chisquare([counts[k] for k in sorted(counts)], [n / 8] * 8)
    assert pvalue > 1e-4


def test_weighted_mixture_hidden_frequencies():
    weights = [Fraction(1, 2), 0, 0, Fraction(1, 4), 0, 0, 0, Fraction(1, 4)]
    s = PlanMixtureStrategy(weights)
    n = 40_000
    counts = Counter(str(s.sample_hidden(src(i)).payload) for i in range(n))
    assert set(counts) == {"+++", "+--", "---"}
    for plan, w in (("+++", 0.5), ("+--", 0.25), ("---", 0.25)):
        assert abs(counts[plan] / n - w) < 4 * sigma(w, n)


def test_quantum_hidden_is_empty():
    assert QuantumSingletStrategy().sample_hidden(src(0)).payload is None


# --- respond_local ------------------------------------------------------------------


def test_plan_table_lookup_and_repeatability():
    s = DeterministicPlanStrategy(Plan.parse("+--"))
    h = HiddenState(Plan.parse("+--"), 0)
    rng = Stream(1, 0, 1, Role.RESPONSE)
    assert s.respond_local(h, B, rng) is M
    assert s.respond_local(h, B, rng) is s.respond_local(h, B, Stream(1, 5, 2, Role.RESPONSE))
    assert s.respond_local(h, A, rng) is P


def test_local_stochastic_rate():
    s = LocalStochasticStrategy(Fraction(1, 2))
    h = HiddenState(None, 0)
    n = 100_000
    plus = sum(s.respond_local(h, A, Stream(2, i, 1, Role.RESPONSE)) is P for i in range(n))
    assert abs(plus / n - 0.5) < 3 * sigma(0.5, n)


@pytest.mark.parametrize("cls", [DeterministicPlanStrategy, PlanMixtureStrategy, LocalStochasticStrategy])
def test_local_responder_interface_shape(cls):
    """A local responder's inputs are exactly (hidden, local setting, local rng)."""
    assert issubclass(cls, LocalResponder)
    assert not hasattr(cls, "respond_joint")
    params = list(inspect.signature(cls.respond_local).parameters)
    assert params == ["self", "hidden", "local_setting", "rng"]


@pytest.mark.parametrize("cls", [QuantumSingletStrategy, NonlocalDeterministicToy, SignalingDemoStrategy])
def test_nonlocal_responder_interface_shape(cls):
    assert issubclass(cls, NonlocalResponder)
    assert not hasattr(cls, "respond_local")


def test_no_strategy_is_both():
    for cls in Strategy.__subclasses__():
        for sub in cls.__subclasses__():
            assert not (issubclass(sub, LocalResponder) and issubclass(sub, NonlocalResponder))


@pytest.mark.parametrize("spec", ["plan:+-+", "mixture:uniform", "nonlocal-det"])
def test_deterministic_claims_hold(spec):
    s = parse_strategy(spec)
    for i in range(200):
        h = s.sample_hidden(src(i))
        for s1, s2 in SETTING_PAIRS:
            if isinstance(s, LocalResponder):
                first = s.respond_local(h, s1, Stream(1, i, 1, Role.RESPONSE))
                again = s.respond_local(h, s1, Stream(1, i, 1, Role.RESPONSE))
            else:
                first = s.respond_joint(h, s1, s2, Stream(1, i, 0, Role.RESPONSE))
                again = s.respond_joint(h, s1, s2, Stream(1, i, 0, Role.RESPONSE))
            assert first == again


# --- respond_joint -------------------------------------------------------------------


def _joint_rate(strategy, s1, s2, n, seed=3):
    equal = 0
    for i in range(n):
        h = strategy.sample_hidden(Stream(seed, i, 0, Role.SOURCE))
        o1, o2 = strategy.respond_joint(h, s1, s2, Stream(seed, i, 0, Role.RESPONSE))
        equal += o1 is o2
    return equal / n


def test_quantum_same_setting_always_equal():
    q = QuantumSingletStrategy()
    for s in (A, B, C):
        assert _joint_rate(q, s, s, 5000) == 1.0


def test_quantum_different_axis_match_quarter():
    n = 100_000
    rate = _joint_rate(QuantumSingletStrategy(), A, B, n)
    assert abs(rate - 0.25) < 3 * sigma(0.25, n)


def test_signaling_demo_remote_marginal():
    s = SignalingDemoStrategy()
    n = 20_000
    for s1, expected in ((A, 0.9), (B, 0.1), (C, 0.1)):
        plus = 0
        for i in range(n):
            _, o2 = s.respond_joint(HiddenState(), s1, A, Stream(4, i, 0, Role.RESPONSE))
            plus += o2 is P
        assert abs(plus / n - expected) < 4 * sigma(expected, n)


# --- quantum_joint ---------------------------------------------------------------------


def test_quantum_joint_same_setting():
    half = Fraction(1, 2)
    assert quantum_joint(A, A) == (half, 0, 0, half)


def test_quantum_joint_sixty_degrees():
    # match probability must be 1/4 and, by the +/- symmetry, splits evenly
    match = Fraction(1, 4)
    expected = (match / 2, (1 - match) / 2, (1 - match) / 2, match / 2)
    assert expected == (Fraction(1, 8), Fraction(3, 8), Fraction(3, 8), Fraction(1, 8))
    assert quantum_joint(A, B) == expected
    assert quantum_joint(C, A) == expected
    assert math.isclose(float(expected[0]), math.cos(math.radians(60)) ** 2 / 2, rel_tol=1e-12)


def test_quantum_joint_normalized_and_float_fallback():
    from eprb.core import AngleSet

    for pair in SETTING_PAIRS:
        assert sum(quantum_joint(*pair)) == 1
    angles = AngleSet(0, 22.5, 67.5)
    cells = quantum_joint(A, B, angles)
    assert isinstance(cells[0], float)
    assert math.isclose(sum(cells), 1.0, abs_tol=1e-12)
    assert math.isclose(cells[0], math.cos(math.radians(22.5)) ** 2 / 2)


def test_quantum_joint_requires_angles():
    with pytest.raises(ValueError):
        quantum_joint(A, B, None)


# --- conditional tables ----------------------------------------------------------------


def test_uniform_mixture_table():
    t = PlanMixtureStrategy().conditional_table()
    assert t.n_lambda == 8
    assert t.deterministic
    assert all(w == Fraction(1, 8) for w in t.lambda_weights)


def test_quantum_table_matches_quantum_joint():
    t = QuantumSingletStrategy().conditional_table()
    assert t.n_lambda == 1
    for pair in SETTING_PAIRS:
        assert t.slice(*pair, 0) == quantum_joint(*pair)


def test_point_plan_table():
    t = DeterministicPlanStrategy(Plan.parse("-+-")).conditional_table()
    assert t.lambda_weights == (Fraction(1),)
    assert t.slice(A, B, 0)[cell_index(M, P)] == 1


def test_toy_table_marginalizes_to_quantum_exactly():
    joint = NonlocalDeterministicToy().conditional_table().marginalize()
    for pair in SETTING_PAIRS:
        assert joint[pair] == quantum_joint(*pair)


def test_table_validation():
    with pytest.raises(ValueError):
        ConditionalTable({(A, A, 0): (1, 0, 0, 0)}, (Fraction(1),))


def test_not_white_box_error():
    class Opaque(LocalResponder):
        kind = LocalStochasticStrategy.kind
        spec = "opaque"

        def sample_hidden(self, rng):
            return HiddenState()

        def respond_local(self, hidden, local_setting, rng):
            return P

    with pytest.raises(NotWhiteBoxError):
        Opaque().conditional_table()


# --- Monte Carlo vs white-box ----------------------------------------------------------


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_empirical_joint_within_4_sigma_of_table(spec, big_log):
    from eprb.analysis import estimate_joint

    log = big_log(spec)
    exact = parse_strategy(spec).conditional_table().marginalize()
    emp = estimate_joint(log)
    for pair in SETTING_PAIRS:
        n = emp.n(pair)
        for i in range(4):
            p = float(exact[pair][i])
            q = float(emp[pair][i])
            assert abs(q - p) <= max(4 * sigma(p, n), 1e-12), (spec, pair, i, p, q)


def test_toy_reproduces_quantum_joint(big_log):
    from eprb.analysis import estimate_joint

    emp = estimate_joint(big_log("nonlocal-det"))
    for pair in SETTING_PAIRS:
        n = emp.n(pair)
        for i, p in enumerate(quantum_joint(*pair)):
            assert abs(float(emp[pair][i]) - float(p)) <= max(4 * sigma(float(p), n), 1e-12)


# --- spec parsing ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec, cls",
    [
        ("plan:+-+", DeterministicPlanStrategy),
        ("mixture:uniform", PlanMixtureStrategy),
        ("mixture:1,0,0,0,0,0,0,0", PlanMixtureStrategy),
        ("mixture:1/2,0,0,0,0,0,0,1/2", PlanMixtureStrategy),
        ("local-stochastic:0.3", LocalStochasticStrategy),
        ("quantum", QuantumSingletStrategy),
        ("nonlocal-det", NonlocalDeterministicToy),
        ("signaling", SignalingDemoStrategy),
    ],
)
def test_parse_strategy(spec, cls):
    assert isinstance(parse_strategy(spec), cls)


@pytest.mark.parametrize("spec", ["bogus", "plan:++", "mixture:1,2", "mixture:1/2,1/2", "local-stochastic:2", "plan:"])
def test_parse_strategy_errors_name_valid_specs(spec):
    with pytest.raises(StrategySpecError) as err:
        parse_strategy(spec)
    assert "quantum" in str(err.value) and "mixture:uniform" in str(err.value)


def test_local_stochastic_spec_round_trip():
    assert parse_strategy("local-stochastic:0.3").spec == "local-stochastic:3/10"
    assert LocalStochasticStrategy(0.3).p == Fraction(3, 10)
