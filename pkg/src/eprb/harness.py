"""Seeded trial loop.

Per trial the order is fixed: the source emits lambda from its own stream,
then each wing draws its setting from a wing-specific stream, then the
responses are collected. Local responders are called once per wing with
only that wing's setting; nonlocal responders get both settings at once.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .core import SETTINGS, ExperimentConfig, Setting, Trial, TrialLog
from .strategies import LocalResponder, NonlocalResponder, Strategy, parse_strategy
from .streams import SOURCE_WING, Role, Stream

log = logging.getLogger(__name__)


def _cumulative(dist: Sequence[float]) -> list[tuple[float, Setting]]:
    edges, acc = [], 0.0
    for setting, w in zip(SETTINGS, dist):
        acc += w
        if w > 0:
            edges.append((acc, setting))
    # absorb float round-off at the top end
    edges[-1] = (2.0, edges[-1][1])
    return edges


def sample_setting(dist: Sequence[float], rng: Stream) -> Setting:
    return _pick(_cumulative(dist), rng.random())


def _pick(edges: list[tuple[float, Setting]], u: float) -> Setting:
    for edge, setting in edges:
        if u < edge:
            return setting
    raise AssertionError("unreachable: last edge exceeds 1")


def _run_block(strategy: Strategy, config: ExperimentConfig, start: int, stop: int) -> list[Trial]:
    seed = config.seed
    edges1, edges2 = (_cumulative(d) for d in config.setting_distribution)
    trace = config.lambda_trace
    if isinstance(strategy, LocalResponder):
        respond = strategy.respond_local
        joint = None
    elif isinstance(strategy, NonlocalResponder):
        respond = None
        joint = strategy.respond_joint
    else:
        raise TypeError(f"{strategy!r} is neither a local nor a nonlocal responder")

    trials = []
    for i in range(start, stop):
        # lambda first, from the source stream only
        hidden = strategy.sample_hidden(Stream(seed, i, SOURCE_WING, Role.SOURCE))
        s1 = _pick(edges1, Stream(seed, i, 1, Role.SETTING).random())
        s2 = _pick(edges2, Stream(seed, i, 2, Role.SETTING).random())
        if joint is None:
            o1 = respond(hidden, s1, Stream(seed, i, 1, Role.RESPONSE))
            o2 = respond(hidden, s2, Stream(seed, i, 2, Role.RESPONSE))
        else:
            o1, o2 = joint(hidden, s1, s2, Stream(seed, i, SOURCE_WING, Role.RESPONSE))
        trials.append(Trial(i, s1, s2, o1, o2, hidden.render() if trace else None))
    return trials


def run_trial(strategy: Strategy, config: ExperimentConfig, index: int) -> Trial:
    return _run_block(strategy, config, index, index + 1)[0]


def _blocks(n: int, workers: int) -> list[tuple[int, int]]:
    size = -(-n // workers)
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def run_experiment(
    config: ExperimentConfig, workers: int = 1, strategy: Strategy | None = None
) -> TrialLog:
    """Run ``config.n_trials`` trials and return them ordered by index.

    ``strategy`` overrides the one parsed from ``config.strategy_spec``
    (used by tests that instrument a strategy). The log does not depend on
    ``workers``.
    """
    if strategy is None:
        strategy = parse_strategy(config.strategy_spec, config.angles)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n = config.n_trials
    if workers == 1 or n < 2 * workers:
        trials = _run_block(strategy, config, 0, n)
    else:
        blocks = _blocks(n, workers)
        log.debug("running %d trials in %d blocks", n, len(blocks))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_block, strategy, config, lo, hi) for lo, hi in blocks]
            trials = [t for f in futures for t in f.result()]
    trials.sort(key=lambda t: t.index)
    return TrialLog(tuple(trials), config.digest, config.seed)


def setting_pair_frequencies(trial_log: TrialLog) -> dict[tuple[Setting, Setting], int]:
    if len(trial_log) == 0:
        raise ValueError("empty trial log")
    counts = Counter((t.setting1, t.setting2) for t in trial_log)
    return {(s1, s2): counts.get((s1, s2), 0) for s1 in SETTINGS for s2 in SETTINGS}


def default_workers() -> int:
    return os.cpu_count() or 1
