"""Command-line entry point: ``eprb {run,analyze,oracle,classify,report}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 analysis where every
headline verdict is Inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import analysis, oracle
from .core import (
    DEFAULT_ANGLES,
    SETTING_PAIRS,
    AngleSet,
    ExperimentConfig,
    LogFormatError,
    TrialLog,
    parse_settings_dist,
)
from .harness import run_experiment
from .strategies import (
    DeterministicPlanStrategy,
    NotWhiteBoxError,
    PlanMixtureStrategy,
    QuantumSingletStrategy,
    StrategySpecError,
    parse_strategy,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INCONCLUSIVE = 4

log = logging.getLogger("eprb")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


CONFIG_KEYS = {
    "strategy": "strategy",
    "n": "n",
    "n_trials": "n",
    "seed": "seed",
    "angles": "angles",
    "settings_dist": "settings_dist",
    "settings-dist": "settings_dist",
    "z": "z",
    "trace_lambda": "trace_lambda",
    "trace-lambda": "trace_lambda",
    "workers": "workers",
    "out": "out",
}


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: expected one of {sorted(set(CONFIG_KEYS))} as key=value")
        values[CONFIG_KEYS[key]] = value.strip()
    return values


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def resolve_config(args: argparse.Namespace) -> tuple[ExperimentConfig, int, str | None]:
    """Merge config file and flags (flags win) into a validated config."""
    values = read_config_file(args.config) if args.config else {}
    for name in ("strategy", "n", "seed", "angles", "settings_dist", "z", "workers", "out"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = str(flag)
    if args.trace_lambda:
        values["trace_lambda"] = "true"
    if "strategy" not in values:
        raise UsageError("--strategy is required")
    try:
        angles = AngleSet.parse(values["angles"]) if "angles" in values else DEFAULT_ANGLES
        strategy = parse_strategy(values["strategy"], angles)
        dist = parse_settings_dist(values["settings_dist"]) if "settings_dist" in values else None
        kwargs = {}
        if dist is not None:
            kwargs["setting_distribution"] = dist
        config = ExperimentConfig(
            strategy_spec=strategy.spec,
            n_trials=int(values.get("n", "10000")),
            seed=int(values.get("seed", "0")),
            lambda_trace=_truthy(values.get("trace_lambda", "false")),
            significance_z=float(values.get("z", str(analysis.DEFAULT_Z))),
            angles=angles,
            **kwargs,
        )
        workers = int(values.get("workers", "1"))
        if workers < 1:
            raise ValueError("workers must be >= 1")
    except StrategySpecError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return config, workers, values.get("out")


def sidecar_path(log_path: str | Path) -> Path:
    return Path(str(log_path) + ".json")


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_run(args: argparse.Namespace) -> int:
    config, workers, out = resolve_config(args)
    trial_log = run_experiment(config, workers=workers)
    text = trial_log.to_csv()
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    meta = {"config": config.to_dict(), "config_digest": config.digest, "seed": config.seed}
    try:
        Path(out).write_text(text)
        sidecar_path(out).write_text(_dump(meta))
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc}") from None
    print(f"wrote {len(trial_log)} trials to {out} (config {config.digest}, seed {config.seed})")
    return EXIT_OK


def load_log(path: str) -> tuple[TrialLog, dict | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    meta = None
    side = sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read sidecar {side}: {exc}") from None
    try:
        trial_log = TrialLog.from_csv(
            text,
            None if meta is None else meta.get("config_digest"),
            None if meta is None else meta.get("seed"),
        )
    except LogFormatError as exc:
        raise DataError(f"{path}: {exc}") from None
    if len(trial_log) == 0:
        raise DataError(f"{path}: log has no trials")
    return trial_log, meta


def _report_for(args: argparse.Namespace) -> dict:
    trial_log, meta = load_log(args.log)
    z = args.z
    if z is None:
        z = meta["config"]["z"] if meta else analysis.DEFAULT_Z
    kind = table = None
    spec = args.strategy or (meta["config"]["strategy"] if meta else None)
    if spec is not None:
        angles = AngleSet(*meta["config"]["angles"]) if meta and "angles" in meta["config"] else DEFAULT_ANGLES
        try:
            strategy = parse_strategy(spec, angles)
        except StrategySpecError as exc:
            raise UsageError(str(exc)) from None
        kind = strategy.kind
        table = strategy.conditional_table() if strategy.kind.white_box else None
    return analysis.analyze(trial_log, z, args.confidence, kind, table)


def cmd_analyze(args: argparse.Namespace) -> int:
    report = _report_for(args)
    out = Path(args.out) if args.out else Path(args.log).with_suffix(".report.json")
    try:
        out.write_text(_dump(report))
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc}") from None
    for line in analysis.summary_lines(report):
        print(line)
    print(f"report written to {out}")
    return EXIT_INCONCLUSIVE if analysis.all_inconclusive(report) else EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = _report_for(args)
    if not args.csv:
        sys.stdout.write(_dump(report))
        return EXIT_INCONCLUSIVE if analysis.all_inconclusive(report) else EXIT_OK
    trial_log, _ = load_log(args.log)
    joint = analysis.estimate_joint(trial_log)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["setting1", "setting2", "n", "p_pp", "p_pm", "p_mp", "p_mm", "match_rate"])
    for pair in SETTING_PAIRS:
        if pair not in joint.p:
            writer.writerow([pair[0].value, pair[1].value, 0, "", "", "", "", ""])
            continue
        cells = [float(c) for c in joint[pair]]
        writer.writerow([pair[0].value, pair[1].value, joint.n(pair), *cells, cells[0] + cells[3]])
    return EXIT_OK


def exact_stats_for(spec: str, angles: AngleSet = DEFAULT_ANGLES) -> oracle.ExactStats:
    strategy = parse_strategy(spec, angles)
    if isinstance(strategy, DeterministicPlanStrategy):
        plans = oracle.enumerate_plans()
        return oracle.exact_stats({p: int(p == strategy.plan) for p in plans})
    if isinstance(strategy, PlanMixtureStrategy):
        return oracle.exact_stats(strategy.weights)
    if isinstance(strategy, QuantumSingletStrategy):
        return oracle.exact_quantum_stats(angles)
    return oracle.exact_stats_from_joint(strategy.conditional_table().marginalize())


def cmd_oracle(args: argparse.Namespace) -> int:
    angles = _angles(args.angles)
    try:
        stats = exact_stats_for(args.strategy, angles)
    except StrategySpecError as exc:
        raise UsageError(str(exc)) from None
    except NotWhiteBoxError as exc:
        raise UsageError(str(exc)) from None
    obj = {"strategy": args.strategy, **stats.to_json_obj()}
    sys.stdout.write(_dump(obj))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    config, workers, _ = resolve_config(args)
    strategy = parse_strategy(config.strategy_spec, config.angles)
    table = strategy.conditional_table() if strategy.kind.white_box else None
    trial_log = run_experiment(config, workers=workers)
    ns = analysis.no_signaling_test(trial_log, config.significance_z).overall
    report = analysis.classify(strategy.kind, table, ns)
    obj = {
        "strategy": config.strategy_spec,
        "config_digest": config.digest,
        "seed": config.seed,
        "n_trials": config.n_trials,
        **report.to_json_obj(),
    }
    sys.stdout.write(_dump(obj))
    return EXIT_OK


def _angles(text: str | None) -> AngleSet:
    if text is None:
        return DEFAULT_ANGLES
    try:
        return AngleSet.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--strategy", help="plan:+-+ | mixture:uniform | mixture:w1,...,w8 | "
                   "local-stochastic:p | quantum | nonlocal-det | signaling")
    p.add_argument("--n", type=int, help="number of trials (default 10000)")
    p.add_argument("--seed", type=int, help="64-bit master seed (default 0)")
    p.add_argument("--angles", help="polarizer angles in degrees, a,b,c (default 0,60,120)")
    p.add_argument("--settings-dist", dest="settings_dist", help="w:w:w or w:w:w,w:w:w per wing")
    p.add_argument("--z", type=float, help="decision threshold in standard errors (default 5)")
    p.add_argument("--trace-lambda", action="store_true", help="record the hidden state per trial")
    p.add_argument("--workers", type=int, help="worker processes (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eprb", description="EPRB experiment simulator and analysis")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="simulate trials and write a TrialLog CSV")
    _add_run_flags(run)
    run.add_argument("--out", help="CSV path (sidecar <out>.json is written next to it); stdout if omitted")
    run.set_defaults(func=cmd_run)

    for name, func, help_text in (
        ("analyze", cmd_analyze, "analyze a TrialLog CSV and write an AnalysisReport JSON"),
        ("report", cmd_report, "print the AnalysisReport JSON, or per-pair rates with --csv"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("log", help="TrialLog CSV")
        p.add_argument("--z", type=float, help="decision threshold (default from sidecar, else 5)")
        p.add_argument("--confidence", type=float, default=analysis.DEFAULT_CONFIDENCE)
        p.add_argument("--strategy", help="strategy spec for white-box classification")
        if name == "analyze":
            p.add_argument("--out", help="report path (default <log>.report.json)")
        else:
            p.add_argument("--csv", action="store_true", help="tidy per-setting-pair rates")
        p.set_defaults(func=func)

    orc = sub.add_parser("oracle", help="exact statistics for a white-box strategy")
    orc.add_argument("--strategy", required=True)
    orc.add_argument("--angles")
    orc.set_defaults(func=cmd_oracle)

    cls = sub.add_parser("classify", help="place a strategy in the theory-space regions")
    _add_run_flags(cls)
    cls.set_defaults(func=cmd_classify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"eprb {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"eprb {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
