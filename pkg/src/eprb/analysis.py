"""Estimators, hypothesis tests and the theory-class classifier.

Conventions for every :class:`Verdict`:

* ``z_score`` is signed so that positive means "towards violating the bound".
* ``Violated`` iff ``z_score > threshold_z``.
* ``Inconclusive`` only when there is not enough data to compute the test.
* ``Satisfied`` otherwise (the bound is not rejected).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from statistics import NormalDist
from typing import Mapping, NamedTuple

from .core import (
    DIFFERENT_PAIRS,
    OUTCOME_PAIRS,
    OUTCOMES,
    SETTING_PAIRS,
    SETTINGS,
    JointDistribution,
    Outcome,
    Prob,
    Setting,
    TrialLog,
    cell_index,
)
from .strategies import ConditionalTable, Locality, Determinism, StrategyKind

DEFAULT_Z = 5.0
DEFAULT_CONFIDENCE = 0.95
BELL_MATCH_BOUND = Fraction(1, 3)
BELL_ORIGINAL_BOUND = Fraction(1)
MIN_DIFFERENT_SETTING_TRIALS = 100

A, B, C = Setting.A, Setting.B, Setting.C
PLUS, MINUS = Outcome.PLUS, Outcome.MINUS


class Status(Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


def _json_num(x: float | None) -> object:
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


@dataclass(frozen=True)
class Verdict:
    status: Status
    statistic: float | None
    z_score: float | None
    threshold_z: float
    n_effective: int
    interval: tuple[float, float] | None = None
    note: str = ""

    @classmethod
    def decide(cls, statistic, z_score, threshold_z, n, interval=None, note="") -> "Verdict":
        status = Status.VIOLATED if z_score > threshold_z else Status.SATISFIED
        return cls(status, statistic, z_score, threshold_z, n, interval, note)

    @classmethod
    def inconclusive(cls, threshold_z, n=0, statistic=None, note="") -> "Verdict":
        return cls(Status.INCONCLUSIVE, statistic, None, threshold_z, n, None, note)

    @property
    def violated(self) -> bool:
        return self.status is Status.VIOLATED

    def to_json_obj(self) -> dict[str, object]:
        return {
            "verdict": self.status.value,
            "statistic": _json_num(self.statistic),
            "z_score": _json_num(self.z_score),
            "threshold_z": self.threshold_z,
            "interval": None if self.interval is None else [float(x) for x in self.interval],
            "n": self.n_effective,
            "note": self.note,
        }


class RateEstimate(NamedTuple):
    estimate: float
    interval: tuple[float, float]
    successes: int
    n: int


def wilson_interval(successes: int, n: int, confidence: float = DEFAULT_CONFIDENCE) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("Wilson interval needs n > 0")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (max(0.0, center - half), min(1.0, center + half))


def _wald_se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def _z(excess: float, se: float) -> float:
    """Signed standard-error units; a zero-variance estimate is decisive."""
    if se > 0:
        return excess / se
    if excess == 0:
        return 0.0
    return math.copysign(math.inf, excess)


# --- estimators --------------------------------------------------------------


def estimate_joint(trial_log: TrialLog) -> JointDistribution:
    """Relative frequencies per setting pair, as exact fractions, with raw counts.

    Setting pairs that never occurred are absent from the result.
    """
    if len(trial_log) == 0:
        raise ValueError("cannot estimate a joint distribution from an empty log")
    tally = Counter((t.setting1, t.setting2, cell_index(t.outcome1, t.outcome2)) for t in trial_log)
    p, counts = {}, {}
    for pair in SETTING_PAIRS:
        cells = tuple(tally.get((*pair, i), 0) for i in range(4))
        n = sum(cells)
        if n == 0:
            continue
        counts[pair] = cells
        p[pair] = tuple(Fraction(c, n) for c in cells)
    return JointDistribution(p, counts)


class Agreement(NamedTuple):
    rate: float
    interval: tuple[float, float]
    verdict: Verdict


def same_setting_agreement(
    trial_log: TrialLog, threshold_z: float = DEFAULT_Z, confidence: float = DEFAULT_CONFIDENCE
) -> Agreement:
    """Fraction of same-setting trials with equal outcomes, tested against 1."""
    same = [t for t in trial_log if t.setting1 is t.setting2]
    if not same:
        raise ValueError("log has no same-setting trials")
    n = len(same)
    k = sum(t.outcome1 is t.outcome2 for t in same)
    rate = k / n
    interval = wilson_interval(k, n, confidence)
    z = _z(1 - rate, _wald_se(rate, n))
    return Agreement(rate, interval, Verdict.decide(rate, z, threshold_z, n, interval))


def p_diff(trial_log: TrialLog, confidence: float = DEFAULT_CONFIDENCE) -> RateEstimate:
    """Fraction of different-setting trials whose outcomes differ, with a Wilson interval."""
    n = k = 0
    for t in trial_log:
        if t.setting1 is not t.setting2:
            n += 1
            k += t.outcome1 is not t.outcome2
    if n == 0:
        raise ValueError("log has no different-setting trials")
    return RateEstimate(k / n, wilson_interval(k, n, confidence), k, n)


def p_diff_weighted(
    joint: JointDistribution, pair_weights: Mapping[tuple[Setting, Setting], Prob]
) -> Prob:
    """Weighted average of p(+-|F) + p(-+|F) over the six different-setting pairs F.

    With equal weights this is the plain mean over the six pairs. Exact
    inputs give an exact ``Fraction``.
    """
    missing = [pair for pair in DIFFERENT_PAIRS if pair not in pair_weights]
    if missing:
        raise ValueError(f"weights missing for setting pairs {missing}")
    total = sum(pair_weights[pair] for pair in DIFFERENT_PAIRS)
    if total == 0:
        raise ValueError("total weight over different-setting pairs is zero")
    acc: Prob = 0
    for pair in DIFFERENT_PAIRS:
        w = pair_weights[pair]
        if w == 0:
            continue
        if pair not in joint.p:
            raise ValueError(f"joint distribution has no data for {pair} but its weight is {w}")
        acc += w * joint.mismatch(pair)
    return acc / total


def uniform_pair_weights() -> dict[tuple[Setting, Setting], Fraction]:
    return {pair: Fraction(1, 6) for pair in DIFFERENT_PAIRS}


def empirical_pair_weights(joint: JointDistribution) -> dict[tuple[Setting, Setting], int]:
    return {pair: joint.n(pair) for pair in DIFFERENT_PAIRS}


# --- Bell tests --------------------------------------------------------------


def bell_threefilter_test(
    trial_log: TrialLog,
    threshold_z: float = DEFAULT_Z,
    min_trials: int = MIN_DIFFERENT_SETTING_TRIALS,
    confidence: float = DEFAULT_CONFIDENCE,
) -> Verdict:
    """One-sided test of "different-setting match rate >= 1/3"."""
    n = k = 0
    for t in trial_log:
        if t.setting1 is not t.setting2:
            n += 1
            k += t.outcome1 is t.outcome2
    if n < min_trials:
        return Verdict.inconclusive(threshold_z, n, note=f"fewer than {min_trials} different-setting trials")
    match = k / n
    z = _z(float(BELL_MATCH_BOUND) - match, _wald_se(match, n))
    return Verdict.decide(match, z, threshold_z, n, wilson_interval(k, n, confidence))


ORIGINAL_TERMS = ((A, B), (B, C), (C, A))


def bell_original_test(joint: JointDistribution, threshold_z: float = DEFAULT_Z) -> Verdict:
    """Test p(+-|AB)+p(+-|BC)+p(+-|CA) <= 1 and its mirrored (-+) form.

    Analytic tables (no counts) are treated as exact. The reported verdict
    is the form with the larger z-score.
    """
    missing = [pair for pair in ORIGINAL_TERMS if pair not in joint.p]
    if missing:
        return Verdict.inconclusive(threshold_z, note=f"missing setting pairs {missing}")
    best: Verdict | None = None
    for cell, label in ((cell_index(PLUS, MINUS), "+-"), (cell_index(MINUS, PLUS), "-+")):
        total = sum(joint[pair][cell] for pair in ORIGINAL_TERMS)
        if joint.counts is None:
            var, n = 0.0, 0
        else:
            var = 0.0
            for pair in ORIGINAL_TERMS:
                q = float(joint[pair][cell])
                var += q * (1 - q) / joint.n(pair)
            n = sum(joint.n(pair) for pair in ORIGINAL_TERMS)
        z = _z(float(total - BELL_ORIGINAL_BOUND), math.sqrt(var))
        if joint.counts is not None:
            total = float(total)
        verdict = Verdict.decide(total, z, threshold_z, n, note=f"form {label}")
        if best is None or z > best.z_score:
            best = verdict
    assert best is not None
    return best


def bell_original_sums(joint: JointDistribution) -> tuple[Prob, Prob]:
    pm = sum(joint[pair][cell_index(PLUS, MINUS)] for pair in ORIGINAL_TERMS)
    mp = sum(joint[pair][cell_index(MINUS, PLUS)] for pair in ORIGINAL_TERMS)
    return pm, mp


# --- no-signaling ------------------------------------------------------------


@dataclass(frozen=True)
class NoSignalingResult:
    wing1: Verdict
    wing2: Verdict
    comparisons: int

    @property
    def overall(self) -> Verdict:
        """The wing with the larger max |z|."""
        decided = [v for v in (self.wing1, self.wing2) if v.z_score is not None]
        if not decided:
            return self.wing1
        return max(decided, key=lambda v: v.z_score)

    def __getitem__(self, wing: int) -> Verdict:
        return {1: self.wing1, 2: self.wing2}[wing]


def _pooled_z(k1: int, n1: int, k2: int, n2: int) -> float:
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    return _z(k1 / n1 - k2 / n2, se)


def no_signaling_test(trial_log: TrialLog, threshold_z: float = DEFAULT_Z) -> NoSignalingResult:
    """Does a wing's PLUS rate, at fixed local setting, depend on the remote setting?

    For each wing and local setting the three remote settings are compared
    pairwise with pooled two-proportion z-tests (9 comparisons per wing, no
    multiplicity correction). The statistic is max |z|.
    """
    plus = Counter()
    total = Counter()
    for t in trial_log:
        total[(1, t.setting1, t.setting2)] += 1
        total[(2, t.setting2, t.setting1)] += 1
        if t.outcome1 is PLUS:
            plus[(1, t.setting1, t.setting2)] += 1
        if t.outcome2 is PLUS:
            plus[(2, t.setting2, t.setting1)] += 1

    verdicts = []
    n_comparisons = 0
    for wing in (1, 2):
        worst = None
        done = skipped = 0
        for local in SETTINGS:
            for r1, r2 in itertools.combinations(SETTINGS, 2):
                n1, n2 = total[(wing, local, r1)], total[(wing, local, r2)]
                if n1 == 0 or n2 == 0:
                    skipped += 1
                    continue
                z = abs(_pooled_z(plus[(wing, local, r1)], n1, plus[(wing, local, r2)], n2))
                done += 1
                worst = z if worst is None else max(worst, z)
        n_comparisons += done
        n_wing = sum(v for (w, _, _), v in total.items() if w == wing)
        note = f"{done} comparisons" + (f", {skipped} skipped (empty cells)" if skipped else "")
        if worst is None:
            verdicts.append(Verdict.inconclusive(threshold_z, n_wing, note=note))
        else:
            verdicts.append(Verdict.decide(worst, worst, threshold_z, n_wing, note=note))
    return NoSignalingResult(verdicts[0], verdicts[1], n_comparisons)


# --- white-box checks ----------------------------------------------------------


def _tol(table: ConditionalTable, tol: float | None) -> float:
    if tol is not None:
        return tol
    exact = all(isinstance(c, (Fraction, int)) for cells in table.entries.values() for c in cells)
    return 0 if exact else 1e-12


def _marginals(cells) -> tuple[tuple[Prob, Prob], tuple[Prob, Prob]]:
    """Wing-1 and wing-2 marginals (PLUS, MINUS) of one 2x2 slice."""
    pp, pm, mp, mm = cells
    return (pp + pm, mp + mm), (pp + mp, pm + mm)


def factorization_check(table: ConditionalTable, tol: float | None = None) -> tuple[bool, float]:
    """Does p(o1,o2|s1,s2,l) equal p(o1|s1,l) * p(o2|s2,l) everywhere?

    The single-wing factors are built from local data only: wing 1's
    factor for (s1, l) is its marginal averaged over the remote setting.
    Returns the verdict and the largest absolute deviation.
    """
    tol = _tol(table, tol)
    worst: Prob = 0
    for k in range(table.n_lambda):
        f1 = {}
        f2 = {}
        for s in SETTINGS:
            m1 = [_marginals(table.slice(s, r, k))[0] for r in SETTINGS]
            m2 = [_marginals(table.slice(r, s, k))[1] for r in SETTINGS]
            f1[s] = tuple(sum(m[i] for m in m1) / 3 for i in range(2))
            f2[s] = tuple(sum(m[i] for m in m2) / 3 for i in range(2))
        for s1, s2 in SETTING_PAIRS:
            cells = table.slice(s1, s2, k)
            for (o1, o2), value in zip(OUTCOME_PAIRS, cells):
                dev = abs(value - f1[s1][OUTCOMES.index(o1)] * f2[s2][OUTCOMES.index(o2)])
                if dev > worst:
                    worst = dev
    return worst <= tol, float(worst)


class JarrettFlags(NamedTuple):
    parameter_independent: bool
    outcome_independent: bool


def parameter_independence(table: ConditionalTable, tol: float | None = None) -> bool:
    tol = _tol(table, tol)
    for k in range(table.n_lambda):
        for s in SETTINGS:
            wing1 = [_marginals(table.slice(s, r, k))[0] for r in SETTINGS]
            wing2 = [_marginals(table.slice(r, s, k))[1] for r in SETTINGS]
            for ms in (wing1, wing2):
                for m in ms[1:]:
                    if any(abs(a - b) > tol for a, b in zip(m, ms[0])):
                        return False
    return True


def outcome_independence(table: ConditionalTable, tol: float | None = None) -> bool:
    """p(o1|s1,s2,l,o2) == p(o1|s1,s2,l) wherever p(o2|s1,s2,l) > 0, and the mirror."""
    tol = _tol(table, tol)
    for key, cells in table.entries.items():
        m1, m2 = _marginals(cells)
        for j, o2 in enumerate(OUTCOMES):
            if m2[j] == 0:
                continue
            for i, o1 in enumerate(OUTCOMES):
                if abs(cells[cell_index(o1, o2)] / m2[j] - m1[i]) > tol:
                    return False
        for i, o1 in enumerate(OUTCOMES):
            if m1[i] == 0:
                continue
            for j, o2 in enumerate(OUTCOMES):
                if abs(cells[cell_index(o1, o2)] / m1[i] - m2[j]) > tol:
                    return False
    return True


def jarrett_decompose(table: ConditionalTable, tol: float | None = None) -> JarrettFlags:
    flags = JarrettFlags(parameter_independence(table, tol), outcome_independence(table, tol))
    factorizes, _ = factorization_check(table, tol)
    assert factorizes == (flags.parameter_independent and flags.outcome_independent), (
        "factorization disagrees with parameter and outcome independence"
    )
    return flags


def signal_local(table: ConditionalTable, tol: float | None = None) -> bool:
    """Exact no-signaling: lambda-averaged marginals ignore the remote setting."""
    tol = _tol(table, tol)
    joint = table.marginalize()
    for s in SETTINGS:
        wing1 = [_marginals(joint[(s, r)])[0] for r in SETTINGS]
        wing2 = [_marginals(joint[(r, s)])[1] for r in SETTINGS]
        for ms in (wing1, wing2):
            if any(abs(m[0] - ms[0][0]) > tol for m in ms[1:]):
                return False
    return True


# --- classification ------------------------------------------------------------


class Region(Enum):
    STRONG_LOCAL_DETERMINISTIC = "StrongLocalDeterministic"
    STRONG_LOCAL_INDETERMINISTIC = "StrongLocalIndeterministic"
    NONLOCAL_DET_NON_SIGNALING = "NonlocalDetNonSignaling"
    NONLOCAL_INDET_NON_SIGNALING = "NonlocalIndetNonSignaling"
    SIGNALING_CAPABLE = "SignalingCapable"


@dataclass(frozen=True)
class ClassificationReport:
    strongly_local: bool | None
    deterministic: bool | None
    parameter_independent: bool | None
    outcome_independent: bool | None
    signal_local_empirical: Verdict | None
    region: Region | None
    partial: bool = False
    signal_local_white_box: bool | None = None
    disagreements: tuple[str, ...] = field(default_factory=tuple)

    def to_json_obj(self) -> dict[str, object]:
        return {
            "region": None if self.region is None else self.region.value,
            "partial": self.partial,
            "strongly_local": self.strongly_local,
            "deterministic": self.deterministic,
            "parameter_independent": self.parameter_independent,
            "outcome_independent": self.outcome_independent,
            "signal_local_white_box": self.signal_local_white_box,
            "signal_local_empirical": (
                None if self.signal_local_empirical is None else self.signal_local_empirical.to_json_obj()
            ),
            "disagreements": list(self.disagreements),
        }


def region_for(strongly_local: bool | None, deterministic: bool | None, signaling: bool | None) -> Region | None:
    if signaling:
        return Region.SIGNALING_CAPABLE
    if strongly_local is None or deterministic is None:
        return None
    if strongly_local:
        return Region.STRONG_LOCAL_DETERMINISTIC if deterministic else Region.STRONG_LOCAL_INDETERMINISTIC
    if signaling is None:
        return None
    return Region.NONLOCAL_DET_NON_SIGNALING if deterministic else Region.NONLOCAL_INDET_NON_SIGNALING


def classify(
    kind: StrategyKind,
    table: ConditionalTable | None = None,
    no_signaling: Verdict | None = None,
) -> ClassificationReport:
    """Place a strategy in the theory-space regions.

    White-box flags, when a table is given, take precedence over the
    empirical no-signaling verdict; any disagreement is recorded.
    """
    empirical_signaling = None
    if no_signaling is not None and no_signaling.status is not Status.INCONCLUSIVE:
        empirical_signaling = no_signaling.violated
    disagreements = []

    if table is not None:
        strongly_local, _ = factorization_check(table)
        deterministic = table.deterministic
        pi, oi = jarrett_decompose(table)
        wb_signal_local = signal_local(table)
        signaling = not wb_signal_local
        if empirical_signaling is not None and empirical_signaling != signaling:
            disagreements.append(
                f"white-box signal locality is {wb_signal_local} but empirical no-signaling test says "
                f"{no_signaling.status.value}"
            )
        if kind.locality is Locality.LOCAL_RESPONDER and not strongly_local:
            disagreements.append("local responder whose table does not factorize")
        claimed = kind.determinism_claim is Determinism.DETERMINISTIC
        if claimed != deterministic:
            disagreements.append(f"claims {kind.determinism_claim.value} but table deterministic={deterministic}")
        region = region_for(strongly_local, deterministic, signaling)
        return ClassificationReport(
            strongly_local, deterministic, pi, oi, no_signaling, region, False, wb_signal_local, tuple(disagreements)
        )

    # Partial: a local responder factorizes by construction; otherwise unknown.
    strongly_local = True if kind.locality is Locality.LOCAL_RESPONDER else None
    deterministic = kind.determinism_claim is Determinism.DETERMINISTIC
    region = region_for(strongly_local, deterministic, empirical_signaling)
    return ClassificationReport(strongly_local, deterministic, None, None, no_signaling, region, True)


def classify_empirical(no_signaling: Verdict | None) -> ClassificationReport:
    """Classification from data alone: only the signaling region is decidable."""
    signaling = None
    if no_signaling is not None and no_signaling.status is not Status.INCONCLUSIVE:
        signaling = no_signaling.violated
    region = Region.SIGNALING_CAPABLE if signaling else None
    return ClassificationReport(None, None, None, None, no_signaling, region, True)


# --- full report ---------------------------------------------------------------


def _section(statistic, interval, verdict: Verdict | None, n: int, **extra) -> dict[str, object]:
    out: dict[str, object] = {
        "statistic": _json_num(statistic),
        "interval": None if interval is None else [float(x) for x in interval],
        "verdict": None if verdict is None else verdict.status.value,
        "n": n,
    }
    if verdict is not None:
        out["z_score"] = _json_num(verdict.z_score)
        out["threshold_z"] = verdict.threshold_z
        if verdict.note:
            out["note"] = verdict.note
    out.update(extra)
    return out


def analyze(
    trial_log: TrialLog,
    threshold_z: float = DEFAULT_Z,
    confidence: float = DEFAULT_CONFIDENCE,
    kind: StrategyKind | None = None,
    table: ConditionalTable | None = None,
) -> dict[str, object]:
    """Every estimator and test on one log, as a JSON-ready dict."""
    joint = estimate_joint(trial_log)
    n = len(trial_log)
    report: dict[str, object] = {
        "config_digest": trial_log.config_digest,
        "seed": trial_log.seed,
        "n_trials": n,
        "threshold_z": threshold_z,
        "confidence": confidence,
    }
    report["joint"] = _section(
        None,
        None,
        None,
        n,
        table=joint.to_json_obj(),
        counts={f"{s1},{s2}": list(c) for (s1, s2), c in (joint.counts or {}).items()},
        missing_pairs=[f"{s1},{s2}" for s1, s2 in joint.missing_pairs],
    )

    try:
        agree = same_setting_agreement(trial_log, threshold_z, confidence)
        report["same_setting_agreement"] = _section(agree.rate, agree.interval, agree.verdict, agree.verdict.n_effective)
    except ValueError as exc:
        v = Verdict.inconclusive(threshold_z, note=str(exc))
        report["same_setting_agreement"] = _section(None, None, v, 0)

    try:
        pd = p_diff(trial_log, confidence)
        weighted = p_diff_weighted(joint, empirical_pair_weights(joint))
        report["p_diff"] = _section(
            pd.estimate, pd.interval, None, pd.n, mismatches=pd.successes, weighted=_json_num(float(weighted))
        )
    except ValueError as exc:
        report["p_diff"] = _section(None, None, None, 0, note=str(exc))

    three = bell_threefilter_test(trial_log, threshold_z, confidence=confidence)
    report["bell_threefilter"] = _section(three.statistic, three.interval, three, three.n_effective, bound="1/3")
    orig = bell_original_test(joint, threshold_z)
    report["bell_original"] = _section(orig.statistic, None, orig, orig.n_effective, bound="1")

    ns = no_signaling_test(trial_log, threshold_z)
    overall = ns.overall
    report["no_signaling"] = _section(
        overall.statistic,
        None,
        overall,
        len(trial_log),
        comparisons=ns.comparisons,
        wing1=ns.wing1.to_json_obj(),
        wing2=ns.wing2.to_json_obj(),
    )

    if kind is not None:
        cls = classify(kind, table, overall)
    else:
        cls = classify_empirical(overall)
    report["classification"] = _section(
        None, None, None, n, **cls.to_json_obj()
    )
    report["classification"]["verdict"] = cls.region.value if cls.region else None
    return report


HEADLINE_KEYS = ("same_setting_agreement", "bell_threefilter", "bell_original", "no_signaling")


def all_inconclusive(report: Mapping[str, object]) -> bool:
    return all(report[k]["verdict"] == Status.INCONCLUSIVE.value for k in HEADLINE_KEYS)  # type: ignore[index]


def summary_lines(report: Mapping[str, object]) -> list[str]:
    lines = [f"trials: {report['n_trials']}  seed: {report['seed']}  config: {report['config_digest']}"]
    for key in HEADLINE_KEYS:
        sec = report[key]  # type: ignore[index]
        stat = sec["statistic"]
        stat_text = f"{stat:.6f}" if isinstance(stat, float) else str(stat)
        z = sec.get("z_score")
        z_text = f"{z:.2f}" if isinstance(z, float) else str(z)
        lines.append(f"{key:24s} {sec['verdict']:13s} statistic={stat_text} z={z_text} n={sec['n']}")
    pd = report["p_diff"]  # type: ignore[index]
    if pd["statistic"] is not None:
        lo, hi = pd["interval"]
        lines.append(f"{'p_diff':24s} {pd['statistic']:.6f} [{lo:.6f}, {hi:.6f}] n={pd['n']}")
    region = report["classification"]["region"]  # type: ignore[index]
    lines.append(f"{'classification':24s} {region if region else 'undetermined (partial)'}")
    return lines
