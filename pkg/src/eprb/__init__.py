"""EPRB experiment simulator: strategies, seeded harness, exact oracle, statistical tests."""

from .core import (
    AngleSet,
    ExperimentConfig,
    HiddenState,
    JointDistribution,
    Outcome,
    Plan,
    PlanType,
    Setting,
    Trial,
    TrialLog,
    classify_plan,
)
from .harness import run_experiment, setting_pair_frequencies
from .strategies import parse_strategy

__all__ = [
    "AngleSet",
    "ExperimentConfig",
    "HiddenState",
    "JointDistribution",
    "Outcome",
    "Plan",
    "PlanType",
    "Setting",
    "Trial",
    "TrialLog",
    "classify_plan",
    "parse_strategy",
    "run_experiment",
    "setting_pair_frequencies",
]
