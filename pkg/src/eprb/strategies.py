"""Correlation strategies.

A strategy is either a :class:`LocalResponder` or a :class:`NonlocalResponder`.
The distinction is carried by which response method exists, never by a
flag: local responders implement ``respond_local(hidden, local_setting, rng)``
and have no way to learn the remote setting.

White-box strategies also expose ``conditional_table()``, the exact
p(o1, o2 | s1, s2, lambda) over an enumerable lambda support.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    DEFAULT_ANGLES,
    OUTCOME_PAIRS,
    SETTING_PAIRS,
    SETTINGS,
    AngleSet,
    HiddenState,
    JointDistribution,
    Outcome,
    Plan,
    Prob,
    Setting,
    normalized,
)
from .streams import Stream

PLUS, MINUS = Outcome.PLUS, Outcome.MINUS

VALID_SPECS = (
    "plan:+-+",
    "mixture:uniform",
    "mixture:w1,...,w8",
    "local-stochastic:p",
    "quantum",
    "nonlocal-det",
    "signaling",
)


class Locality(Enum):
    LOCAL_RESPONDER = "LocalResponder"
    NONLOCAL_RESPONDER = "NonlocalResponder"


class Determinism(Enum):
    DETERMINISTIC = "Deterministic"
    STOCHASTIC = "Stochastic"


@dataclass(frozen=True)
class StrategyKind:
    locality: Locality
    determinism_claim: Determinism
    white_box: bool


class NotWhiteBoxError(TypeError):
    pass


@dataclass(frozen=True)
class ConditionalTable:
    """Exact (or float) conditionals p(o1,o2|s1,s2,lambda_k) with weights over k."""

    entries: Mapping[tuple[Setting, Setting, int], tuple[Prob, Prob, Prob, Prob]]
    lambda_weights: tuple[Prob, ...]

    def __post_init__(self) -> None:
        if not normalized(self.lambda_weights):
            raise ValueError("lambda weights must sum to 1")
        for key, cells in self.entries.items():
            if not normalized(cells):
                raise ValueError(f"conditional slice {key} does not sum to 1")
        expected = {(s1, s2, k) for s1, s2 in SETTING_PAIRS for k in range(len(self.lambda_weights))}
        if set(self.entries) != expected:
            raise ValueError("conditional table must cover every (s1, s2, lambda)")

    @property
    def n_lambda(self) -> int:
        return len(self.lambda_weights)

    def slice(self, s1: Setting, s2: Setting, k: int) -> tuple[Prob, Prob, Prob, Prob]:
        return self.entries[(s1, s2, k)]

    def marginalize(self) -> JointDistribution:
        """Average over lambda: the observable joint distribution."""
        p = {}
        for s1, s2 in SETTING_PAIRS:
            acc: list[Prob] = [0, 0, 0, 0]
            for k, w in enumerate(self.lambda_weights):
                if w == 0:
                    continue
                cells = self.entries[(s1, s2, k)]
                for i in range(4):
                    acc[i] += w * cells[i]
            if all(isinstance(x, (Fraction, int)) for x in acc):
                p[(s1, s2)] = tuple(Fraction(x) for x in acc)
            else:
                total = sum(acc)
                p[(s1, s2)] = tuple(float(x) / total for x in acc)
        return JointDistribution(p)

    @property
    def deterministic(self) -> bool:
        return all(c in (0, 1) for cells in self.entries.values() for c in cells)


class Strategy(ABC):
    kind: StrategyKind
    spec: str

    @abstractmethod
    def sample_hidden(self, rng: Stream) -> HiddenState: ...

    def conditional_table(self) -> ConditionalTable:
        raise NotWhiteBoxError(f"strategy {self.spec!r} is not white-box")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec!r})"


class LocalResponder(Strategy):
    @abstractmethod
    def respond_local(self, hidden: HiddenState, local_setting: Setting, rng: Stream) -> Outcome: ...


class NonlocalResponder(Strategy):
    @abstractmethod
    def respond_joint(
        self, hidden: HiddenState, setting1: Setting, setting2: Setting, rng: Stream
    ) -> tuple[Outcome, Outcome]: ...


# --- quantum prediction -----------------------------------------------------

# cos^2 of angle differences (mod 180) that have rational values.
_EXACT_COS2 = {
    0.0: Fraction(1),
    30.0: Fraction(3, 4),
    45.0: Fraction(1, 2),
    60.0: Fraction(1, 4),
    90.0: Fraction(0),
    120.0: Fraction(1, 4),
    135.0: Fraction(1, 2),
    150.0: Fraction(3, 4),
}


def cos2_delta(delta_deg: float) -> Prob:
    """cos^2 of an angle difference; exact rational where one exists."""
    reduced = math.fmod(delta_deg, 180.0) % 180.0
    if math.isclose(reduced, 180.0, abs_tol=1e-9):
        reduced = 0.0
    for key, value in _EXACT_COS2.items():
        if math.isclose(reduced, key, abs_tol=1e-9):
            return value
    return math.cos(math.radians(reduced)) ** 2


def quantum_joint(
    setting1: Setting, setting2: Setting, angles: AngleSet | None = DEFAULT_ANGLES
) -> tuple[Prob, Prob, Prob, Prob]:
    """Singlet-analog slice (++, +-, -+, --) for one setting pair."""
    if angles is None:
        raise ValueError("quantum_joint needs an angle configuration")
    c2 = cos2_delta(angles[setting1] - angles[setting2])
    if isinstance(c2, Fraction):
        same = c2 / 2
        diff = (1 - c2) / 2
    else:
        same = c2 / 2
        diff = 0.5 - same
    return (same, diff, diff, same)


def quantum_distribution(angles: AngleSet = DEFAULT_ANGLES) -> JointDistribution:
    return JointDistribution({pair: quantum_joint(*pair, angles) for pair in SETTING_PAIRS})


def _point_slice(o1: Outcome, o2: Outcome) -> tuple[Fraction, ...]:
    return tuple(Fraction(int((a, b) == (o1, o2))) for a, b in OUTCOME_PAIRS)


# --- local strategies -------------------------------------------------------


class DeterministicPlanStrategy(LocalResponder):
    kind = StrategyKind(Locality.LOCAL_RESPONDER, Determinism.DETERMINISTIC, True)

    def __init__(self, plan: Plan):
        self.plan = plan
        self.spec = f"plan:{plan}"

    def sample_hidden(self, rng: Stream) -> HiddenState:
        return HiddenState(self.plan, rng.trial)

    def respond_local(self, hidden: HiddenState, local_setting: Setting, rng: Stream) -> Outcome:
        return hidden.payload[local_setting]  # type: ignore[index]

    def conditional_table(self) -> ConditionalTable:
        return _plan_table([self.plan], (Fraction(1),))


def all_plans() -> list[Plan]:
    """The eight plans in canonical order (A, B, C) x (PLUS before MINUS)."""
    return [Plan(answers) for answers in itertools.product((PLUS, MINUS), repeat=3)]  # type: ignore[misc]


def _plan_table(plans: Sequence[Plan], weights: Sequence[Fraction]) -> ConditionalTable:
    entries = {}
    for k, plan in enumerate(plans):
        for s1, s2 in SETTING_PAIRS:
            entries[(s1, s2, k)] = _point_slice(plan[s1], plan[s2])
    return ConditionalTable(entries, tuple(weights))


class PlanMixtureStrategy(LocalResponder):
    """lambda is a plan drawn from fixed weights over the eight plans."""

    kind = StrategyKind(Locality.LOCAL_RESPONDER, Determinism.DETERMINISTIC, True)

    def __init__(self, weights: Sequence[Fraction | int | str] | None = None, spec: str | None = None):
        self.plans = all_plans()
        if weights is None:
            weights = [Fraction(1, 8)] * 8
        ws = tuple(Fraction(w) for w in weights)
        if len(ws) != 8 or any(w < 0 for w in ws):
            raise ValueError("a plan mixture needs eight nonnegative weights")
        if sum(ws) != 1:
            raise ValueError(f"plan mixture weights sum to {sum(ws)}, not 1")
        self.weights = ws
        cumulative = []
        acc = Fraction(0)
        for w in ws:
            acc += w
            cumulative.append(float(acc))
        cumulative[-1] = 1.0
        self._cumulative = cumulative
        self.spec = spec or "mixture:" + ",".join(str(w) for w in ws)

    def sample_hidden(self, rng: Stream) -> HiddenState:
        u = rng.random()
        for plan, edge, w in zip(self.plans, self._cumulative, self.weights):
            if u < edge and w > 0:
                return HiddenState(plan, rng.trial)
        # u landed on a zero-weight tail; take the last plan with weight
        last = max(i for i, w in enumerate(self.weights) if w > 0)
        return HiddenState(self.plans[last], rng.trial)

    def respond_local(self, hidden: HiddenState, local_setting: Setting, rng: Stream) -> Outcome:
        return hidden.payload[local_setting]  # type: ignore[index]

    def conditional_table(self) -> ConditionalTable:
        return _plan_table(self.plans, self.weights)


class LocalStochasticStrategy(LocalResponder):
    """Each wing independently answers PLUS with probability ``p``; lambda is empty."""

    kind = StrategyKind(Locality.LOCAL_RESPONDER, Determinism.STOCHASTIC, True)

    def __init__(self, p: Fraction | float | str = Fraction(1, 2)):
        p = Fraction(p) if not isinstance(p, float) else Fraction(str(p))
        if not 0 <= p <= 1:
            raise ValueError(f"local-stochastic probability must be in [0, 1], got {p}")
        self.p = p
        self._p_float = float(p)
        self.spec = f"local-stochastic:{p}"

    def sample_hidden(self, rng: Stream) -> HiddenState:
        return HiddenState(None, rng.trial)

    def respond_local(self, hidden: HiddenState, local_setting: Setting, rng: Stream) -> Outcome:
        return PLUS if rng.random() < self._p_float else MINUS

    def conditional_table(self) -> ConditionalTable:
        p, q = self.p, 1 - self.p
        cells = (p * p, p * q, q * p, q * q)
        return ConditionalTable({(s1, s2, 0): cells for s1, s2 in SETTING_PAIRS}, (Fraction(1),))


# --- nonlocal strategies ----------------------------------------------------


class QuantumSingletStrategy(NonlocalResponder):
    """Collapse picture: wing 1 is a fair coin, wing 2 agrees with prob cos^2(delta)."""

    kind = StrategyKind(Locality.NONLOCAL_RESPONDER, Determinism.STOCHASTIC, True)
    spec = "quantum"

    def __init__(self, angles: AngleSet = DEFAULT_ANGLES):
        self.angles = angles
        self._agree = {
            pair: float(cos2_delta(angles[pair[0]] - angles[pair[1]])) for pair in SETTING_PAIRS
        }

    def sample_hidden(self, rng: Stream) -> HiddenState:
        return HiddenState(None, rng.trial)

    def respond_joint(self, hidden, setting1, setting2, rng):
        o1 = PLUS if rng.random() < 0.5 else MINUS
        if rng.random() < self._agree[(setting1, setting2)]:
            return o1, o1
        return o1, (MINUS if o1 is PLUS else PLUS)

    def conditional_table(self) -> ConditionalTable:
        entries = {(s1, s2, 0): quantum_joint(s1, s2, self.angles) for s1, s2 in SETTING_PAIRS}
        return ConditionalTable(entries, (Fraction(1),))


class NonlocalDeterministicToy(NonlocalResponder):
    """lambda = u ~ U[0,1); the outcome pair is the inverse CDF of the quantum slice at u.

    The white-box table discretizes u onto the midpoints of a uniform grid
    (1024 cells by default). With the default angles every CDF edge is a
    multiple of 1/8, so the grid reproduces the quantum joint exactly.
    """

    kind = StrategyKind(Locality.NONLOCAL_RESPONDER, Determinism.DETERMINISTIC, True)
    spec = "nonlocal-det"

    def __init__(self, angles: AngleSet = DEFAULT_ANGLES, grid: int = 1024):
        if grid <= 0:
            raise ValueError("grid must be positive")
        self.angles = angles
        self.grid = grid
        self._edges = {}
        self._float_edges = {}
        for pair in SETTING_PAIRS:
            acc, edges = 0, []
            for c in quantum_joint(*pair, angles)[:3]:
                acc += c
                edges.append(acc)
            self._edges[pair] = edges
            self._float_edges[pair] = [float(e) for e in edges]

    def sample_hidden(self, rng: Stream) -> HiddenState:
        return HiddenState(rng.random(), rng.trial)

    @staticmethod
    def _cell(u: Prob, edges: Sequence[Prob]) -> int:
        for i, edge in enumerate(edges):
            if u < edge:
                return i
        return 3

    def respond_joint(self, hidden, setting1, setting2, rng):
        return OUTCOME_PAIRS[self._cell(hidden.payload, self._float_edges[(setting1, setting2)])]

    def conditional_table(self) -> ConditionalTable:
        entries = {}
        for k in range(self.grid):
            u = Fraction(2 * k + 1, 2 * self.grid)
            for pair in SETTING_PAIRS:
                entries[(*pair, k)] = _point_slice(*OUTCOME_PAIRS[self._cell(u, self._edges[pair])])
        return ConditionalTable(entries, tuple([Fraction(1, self.grid)] * self.grid))


class SignalingDemoStrategy(NonlocalResponder):
    """Wing 2's PLUS rate is 0.9 when setting1 is A and 0.1 otherwise."""

    kind = StrategyKind(Locality.NONLOCAL_RESPONDER, Determinism.STOCHASTIC, True)
    spec = "signaling"
    HIGH = Fraction(9, 10)
    LOW = Fraction(1, 10)

    def sample_hidden(self, rng: Stream) -> HiddenState:
        return HiddenState(None, rng.trial)

    def respond_joint(self, hidden, setting1, setting2, rng):
        o1 = PLUS if rng.random() < 0.5 else MINUS
        p2 = 0.9 if setting1 is Setting.A else 0.1
        o2 = PLUS if rng.random() < p2 else MINUS
        return o1, o2

    def conditional_table(self) -> ConditionalTable:
        half = Fraction(1, 2)
        entries = {}
        for s1, s2 in SETTING_PAIRS:
            p2 = self.HIGH if s1 is Setting.A else self.LOW
            entries[(s1, s2, 0)] = (half * p2, half * (1 - p2), half * p2, half * (1 - p2))
        return ConditionalTable(entries, (Fraction(1),))


# --- spec parsing -----------------------------------------------------------


class StrategySpecError(ValueError):
    def __init__(self, spec: str, reason: str = ""):
        detail = f" ({reason})" if reason else ""
        super().__init__(
            f"invalid strategy spec {spec!r}{detail}; valid forms: {', '.join(VALID_SPECS)}"
        )


def parse_strategy(spec: str, angles: AngleSet = DEFAULT_ANGLES) -> Strategy:
    text = spec.strip()
    name, _, arg = text.partition(":")
    try:
        if name == "plan" and arg:
            return DeterministicPlanStrategy(Plan.parse(arg))
        if name == "mixture" and arg:
            if arg == "uniform":
                return PlanMixtureStrategy(None, spec="mixture:uniform")
            weights = [Fraction(w) for w in arg.split(",")]
            return PlanMixtureStrategy(weights)
        if name == "local-stochastic":
            return LocalStochasticStrategy(Fraction(arg) if arg else Fraction(1, 2))
        if text == "quantum":
            return QuantumSingletStrategy(angles)
        if text == "nonlocal-det":
            return NonlocalDeterministicToy(angles)
        if text == "signaling":
            return SignalingDemoStrategy()
    except (ValueError, ZeroDivisionError) as exc:
        raise StrategySpecError(spec, str(exc)) from None
    raise StrategySpecError(spec)
