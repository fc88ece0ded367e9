"""Domain types shared across the package.

Probabilities live in one of two forms: exact ``Fraction`` values (oracle
path, analytic tables, frequency estimates) or ``float`` values (generic
angles, Monte Carlo summaries). Conversion is always explicit through
``JointDistribution.as_float``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

Prob = Union[Fraction, float]

NORMALIZATION_TOL = 1e-12


class Setting(Enum):
    """Measurement choice (filter type) at one wing."""

    A = "A"
    B = "B"
    C = "C"

    @classmethod
    def parse(cls, text: str) -> "Setting":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"invalid setting {text!r}; expected A, B or C") from None

    def __str__(self) -> str:
        return self.value


SETTINGS: tuple[Setting, ...] = (Setting.A, Setting.B, Setting.C)
SETTING_PAIRS: tuple[tuple[Setting, Setting], ...] = tuple(itertools.product(SETTINGS, SETTINGS))
SAME_PAIRS = tuple((s, s) for s in SETTINGS)
DIFFERENT_PAIRS = tuple(p for p in SETTING_PAIRS if p[0] is not p[1])


class Outcome(Enum):
    """Binary result. PLUS means "passes through" / "Yes"."""

    PLUS = "+"
    MINUS = "-"

    @classmethod
    def parse(cls, text: str) -> "Outcome":
        t = text.strip()
        if t in ("+", "Plus", "PLUS"):
            return cls.PLUS
        if t in ("-", "−", "Minus", "MINUS"):
            return cls.MINUS
        raise ValueError(f"invalid outcome {text!r}; expected + or -")

    def __str__(self) -> str:
        return self.value


OUTCOMES: tuple[Outcome, ...] = (Outcome.PLUS, Outcome.MINUS)
# Cell order used everywhere a 2x2 slice is flattened: ++, +-, -+, --.
OUTCOME_PAIRS: tuple[tuple[Outcome, Outcome], ...] = tuple(itertools.product(OUTCOMES, OUTCOMES))


def cell_index(o1: Outcome, o2: Outcome) -> int:
    return (o1 is Outcome.MINUS) * 2 + (o2 is Outcome.MINUS)


@dataclass(frozen=True)
class AngleSet:
    """Polarizer angles in degrees for settings A, B, C."""

    a: float = 0.0
    b: float = 60.0
    c: float = 120.0

    def __post_init__(self) -> None:
        reduced = [math.fmod(x, 180.0) % 180.0 for x in (self.a, self.b, self.c)]
        for x, y in itertools.combinations(reduced, 2):
            if math.isclose(x, y, abs_tol=1e-9):
                raise ValueError(f"angles must be distinct modulo 180 degrees: {self.as_tuple()}")

    def __getitem__(self, setting: Setting) -> float:
        return {Setting.A: self.a, Setting.B: self.b, Setting.C: self.c}[setting]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    @classmethod
    def parse(cls, text: str) -> "AngleSet":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated angles, got {text!r}")
        return cls(*(float(p) for p in parts))

    def __str__(self) -> str:
        return ",".join(_fmt_num(x) for x in self.as_tuple())


DEFAULT_ANGLES = AngleSet()


@dataclass(frozen=True)
class Plan:
    """Deterministic response table: one outcome per setting, ordered A, B, C."""

    answers: tuple[Outcome, Outcome, Outcome]

    def __post_init__(self) -> None:
        if len(self.answers) != 3 or not all(isinstance(o, Outcome) for o in self.answers):
            raise ValueError("a plan assigns exactly one outcome to each of A, B, C")

    def __getitem__(self, setting: Setting) -> Outcome:
        return self.answers[SETTINGS.index(setting)]

    @classmethod
    def parse(cls, text: str) -> "Plan":
        text = text.strip()
        if len(text) != 3:
            raise ValueError(f"plan must be three of '+'/'-', got {text!r}")
        return cls(tuple(Outcome.parse(ch) for ch in text))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return "".join(o.value for o in self.answers)


class PlanType(Enum):
    ALL_PLUS = "AllPlus"
    TWO_PLUS_ONE_MINUS = "TwoPlusOneMinus"
    TWO_MINUS_ONE_PLUS = "TwoMinusOnePlus"
    ALL_MINUS = "AllMinus"


def classify_plan(plan: Plan) -> PlanType:
    n_plus = sum(o is Outcome.PLUS for o in plan.answers)
    return (
        PlanType.ALL_MINUS,
        PlanType.TWO_MINUS_ONE_PLUS,
        PlanType.TWO_PLUS_ONE_MINUS,
        PlanType.ALL_PLUS,
    )[n_plus]


class HiddenState(NamedTuple):
    """Per-trial shared state emitted by a strategy's source."""

    payload: object = None
    trace_id: int = 0

    def render(self) -> str:
        if self.payload is None:
            return ""
        if isinstance(self.payload, float):
            return repr(self.payload)
        return str(self.payload)


class Trial(NamedTuple):
    index: int
    setting1: Setting
    setting2: Setting
    outcome1: Outcome
    outcome2: Outcome
    hidden: str | None = None  # rendered payload, only with lambda tracing

    @property
    def same_setting(self) -> bool:
        return self.setting1 is self.setting2

    @property
    def outcomes_equal(self) -> bool:
        return self.outcome1 is self.outcome2

    def swapped(self) -> "Trial":
        return Trial(self.index, self.setting2, self.setting1, self.outcome2, self.outcome1, self.hidden)


class LogFormatError(ValueError):
    """Malformed TrialLog CSV; ``line`` is 1-based and counts the header."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


CSV_HEADER = ["trial", "setting1", "setting2", "outcome1", "outcome2"]


@dataclass(frozen=True)
class TrialLog:
    trials: tuple[Trial, ...]
    config_digest: str | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.trials)

    def __iter__(self):
        return iter(self.trials)

    @property
    def traced(self) -> bool:
        return bool(self.trials) and self.trials[0].hidden is not None

    def swapped(self) -> "TrialLog":
        """Relabel wings 1 and 2 throughout."""
        return TrialLog(tuple(t.swapped() for t in self.trials), self.config_digest, self.seed)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        traced = self.traced
        writer.writerow(CSV_HEADER + (["lambda"] if traced else []))
        for t in self.trials:
            row = [t.index, t.setting1.value, t.setting2.value, t.outcome1.value, t.outcome2.value]
            if traced:
                row.append(t.hidden)
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, config_digest: str | None = None, seed: int | None = None) -> "TrialLog":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise LogFormatError(1, "empty file") from None
        traced = header == CSV_HEADER + ["lambda"]
        if header != CSV_HEADER and not traced:
            raise LogFormatError(1, f"unexpected header {','.join(header)!r}")
        width = len(header)
        trials = []
        seen: set[int] = set()
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width:
                raise LogFormatError(lineno, f"expected {width} fields, got {len(row)}")
            try:
                index = int(row[0])
                trial = Trial(
                    index,
                    Setting.parse(row[1]),
                    Setting.parse(row[2]),
                    Outcome.parse(row[3]),
                    Outcome.parse(row[4]),
                    row[5] if traced else None,
                )
            except ValueError as exc:
                raise LogFormatError(lineno, str(exc)) from None
            if index < 0 or index in seen:
                raise LogFormatError(lineno, f"trial index {index} is negative or duplicated")
            seen.add(index)
            trials.append(trial)
        return cls(tuple(trials), config_digest, seed)


@dataclass(frozen=True)
class JointDistribution:
    """Table p(o1, o2 | s1, s2) keyed by setting pair.

    Each slice is a 4-tuple in cell order (++, +-, -+, --). Pairs with no
    data are simply absent; ``counts`` holds raw cell counts when the table
    was estimated from trials.
    """

    p: Mapping[tuple[Setting, Setting], tuple[Prob, Prob, Prob, Prob]]
    counts: Mapping[tuple[Setting, Setting], tuple[int, int, int, int]] | None = None

    def __post_init__(self) -> None:
        for pair, cells in self.p.items():
            if len(cells) != 4:
                raise ValueError(f"slice {pair} must have 4 cells")
            if any(c < 0 or c > 1 for c in cells):
                raise ValueError(f"slice {pair} has entries outside [0, 1]")
            total = sum(cells)
            if isinstance(total, Fraction):
                if total != 1:
                    raise ValueError(f"slice {pair} sums to {total}, not 1")
            elif abs(total - 1) > NORMALIZATION_TOL:
                raise ValueError(f"slice {pair} sums to {total!r}, not 1")

    def __getitem__(self, pair: tuple[Setting, Setting]) -> tuple[Prob, Prob, Prob, Prob]:
        return self.p[pair]

    def prob(self, s1: Setting, s2: Setting, o1: Outcome, o2: Outcome) -> Prob:
        return self.p[(s1, s2)][cell_index(o1, o2)]

    @property
    def missing_pairs(self) -> list[tuple[Setting, Setting]]:
        return [pair for pair in SETTING_PAIRS if pair not in self.p]

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (Fraction, int)) for cells in self.p.values() for c in cells)

    def n(self, pair: tuple[Setting, Setting]) -> int:
        if self.counts is None or pair not in self.counts:
            return 0
        return sum(self.counts[pair])

    def mismatch(self, pair: tuple[Setting, Setting]) -> Prob:
        cells = self.p[pair]
        return cells[1] + cells[2]

    def as_float(self) -> "JointDistribution":
        return JointDistribution(
            {pair: tuple(float(c) for c in cells) for pair, cells in self.p.items()},  # type: ignore[misc]
            self.counts,
        )

    def swapped(self) -> "JointDistribution":
        def flip(cells):
            return (cells[0], cells[2], cells[1], cells[3])

        p = {(s2, s1): flip(cells) for (s1, s2), cells in self.p.items()}
        counts = None
        if self.counts is not None:
            counts = {(s2, s1): flip(c) for (s1, s2), c in self.counts.items()}
        return JointDistribution(p, counts)

    def to_json_obj(self) -> dict[str, list[list[object]]]:
        out: dict[str, list[list[object]]] = {}
        for s1, s2 in SETTING_PAIRS:
            if (s1, s2) not in self.p:
                continue
            cells = [prob_to_json(c) for c in self.p[(s1, s2)]]
            out[f"{s1.value},{s2.value}"] = [cells[0:2], cells[2:4]]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: Mapping[str, Sequence[Sequence[object]]]) -> "JointDistribution":
        p = {}
        for key, rows in obj.items():
            s1, s2 = (Setting.parse(x) for x in key.split(","))
            cells = [prob_from_json(v) for row in rows for v in row]
            p[(s1, s2)] = tuple(cells)
        return cls(p)

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        return cls.from_json_obj(json.loads(text))


def prob_to_json(x: Prob) -> object:
    """Exact rationals render as ``"p/q"`` strings, floats stay numbers."""
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    return float(x)


def prob_from_json(v: object) -> Prob:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)  # type: ignore[arg-type]


UNIFORM_SETTINGS: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)


def parse_settings_dist(text: str) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """Parse ``w:w:w`` (both wings) or ``w:w:w,w:w:w`` (wing 1, wing 2)."""
    groups = [g for g in text.replace(" ", "").split(",") if g]
    if len(groups) not in (1, 2):
        raise ValueError(f"settings distribution must be w:w:w[,w:w:w], got {text!r}")
    wings = []
    for g in groups:
        parts = g.split(":")
        if len(parts) != 3:
            raise ValueError(f"settings distribution needs three weights per wing, got {g!r}")
        wings.append(tuple(float(Fraction(x)) for x in parts))
    if len(wings) == 1:
        wings.append(wings[0])
    return wings[0], wings[1]  # type: ignore[return-value]


def _fmt_num(x: float) -> str:
    return repr(float(x)) if not float(x).is_integer() else str(int(x))


@dataclass(frozen=True)
class ExperimentConfig:
    strategy_spec: str
    n_trials: int
    seed: int
    setting_distribution: tuple[tuple[float, float, float], tuple[float, float, float]] = (
        UNIFORM_SETTINGS,
        UNIFORM_SETTINGS,
    )
    lambda_trace: bool = False
    significance_z: float = 5.0
    angles: AngleSet = field(default_factory=AngleSet)

    def __post_init__(self) -> None:
        if not isinstance(self.n_trials, int) or self.n_trials <= 0:
            raise ValueError(f"n_trials must be a positive integer, got {self.n_trials!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.significance_z <= 0:
            raise ValueError("significance_z must be positive")
        if len(self.setting_distribution) != 2:
            raise ValueError("setting_distribution needs one vector per wing")
        for wing, dist in enumerate(self.setting_distribution, start=1):
            if len(dist) != 3 or any(w < 0 for w in dist):
                raise ValueError(f"wing {wing} setting distribution must be 3 nonnegative weights")
            if abs(sum(dist) - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"wing {wing} setting distribution sums to {sum(dist)!r}, not 1")
        # store plain floats so the digest and the sampler see one representation
        floats = tuple(tuple(float(w) for w in dist) for dist in self.setting_distribution)
        object.__setattr__(self, "setting_distribution", floats)

    def to_dict(self) -> dict[str, object]:
        return {
            "strategy": self.strategy_spec,
            "n_trials": self.n_trials,
            "seed": self.seed,
            "settings_dist": [list(d) for d in self.setting_distribution],
            "lambda_trace": self.lambda_trace,
            "z": self.significance_z,
            "angles": list(self.angles.as_tuple()),
        }

    @property
    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def normalized(values: Iterable[Prob]) -> bool:
    total = sum(values)
    if isinstance(total, Fraction):
        return total == 1
    return abs(total - 1) <= NORMALIZATION_TOL
