from __future__ import annotations

import pytest

from eprb.core import ExperimentConfig
from eprb.harness import run_experiment

N_LARGE = 100_000


@pytest.fixture(scope="session")
def big_log():
    """Memoized N = 1e5 logs keyed by strategy spec (seed 7)."""
    cache = {}

    def get(spec, seed=7, n=N_LARGE):
        key = (spec, seed, n)
        if key not in cache:
            cache[key] = run_experiment(ExperimentConfig(spec, n, seed))
        return cache[key]

    return get


def sigma(p, n):
    return (p * (1 - p) / n) ** 0.5


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> None:
    """Store one acceptance line and echo it (visible with ``-s``)."""
    ACCEPTANCE_RESULTS[criterion] = (passed, detail)
    print(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[criterion]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
