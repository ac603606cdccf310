"""Command-line interface.

Subcommands: `run` (execute replicates of one method), `aggregate` (fold
run CSVs into a mean/SEM summary), `plot` (render summary SVGs), `ablate`
(expand a flag sweep into multiple runs). Flag values can also come from a
flat `key = value` config file; explicit flags win. The default output
directory is $JOCO_RESULTS_DIR, falling back to ./results.

Exit codes: 0 success, 1 a run aborted numerically (partial results
written), 2 unknown problem or method, 3 malformed/empty input files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import math

from ..baselines import METHOD_NAMES, MethodSpec
from ..core import AblationFlags, TrainConfig, init_count
from ..problems import problem_names
from .aggregate import MalformedCsvError, aggregate_dir_to_summary, read_summary
from .plotsvg import plot_summary_rows
from .runner import RunConfig, run_many_to_files

SWEEP_VARIANTS = {
    "full": {},
    "no_joint_training": {"joint_training": False},
    "no_updates": {"update_models": False},
    "no_trust_region": {"use_trust_region": False},
    "no_outcome_uncertainty": {"outcome_uncertainty": False},
    "no_reward_uncertainty": {"reward_uncertainty": False},
    "ei": {"acquisition": "mc_ei"},
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_bool(raw: str, key: str) -> bool:
    v = raw.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")


def read_config_file(path: str) -> dict[str, str]:
    """Flat `key = value` file; blank lines and #-comments are skipped."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        values[key.strip()] = raw.strip()
    return values


def _add_run_flags(p: argparse.ArgumentParser, with_method: bool) -> None:
    p.add_argument("--problem", default=None)
    if with_method:
        p.add_argument("--method", default=None, help=f"one of {', '.join(METHOD_NAMES)}")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seeds", default=None, help="comma-separated 64-bit integers")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")
    p.add_argument("--no-joint-training", action="store_const", const=True, default=None)
    p.add_argument("--no-updates", action="store_const", const=True, default=None)
    p.add_argument("--no-trust-region", action="store_const", const=True, default=None)
    p.add_argument("--no-outcome-uncertainty", action="store_const", const=True, default=None)
    p.add_argument("--no-reward-uncertainty", action="store_const", const=True, default=None)
    p.add_argument("--acquisition", choices=["ts", "ei"], default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--nb", type=int, default=None)
    p.add_argument("--epochs-update", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="joco", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute replicate runs of one method")
    _add_run_flags(p_run, with_method=True)

    p_agg = sub.add_parser("aggregate", help="summarize run CSVs into summary.csv")
    p_agg.add_argument("result_dir")

    p_plot = sub.add_parser("plot", help="render convergence SVGs from a summary")
    p_plot.add_argument("summary")
    p_plot.add_argument("--out", default=None, help="output directory (default: alongside summary)")

    p_abl = sub.add_parser("ablate", help="run a sweep of ablation variants")
    _add_run_flags(p_abl, with_method=False)
    p_abl.add_argument(
        "--sweep",
        default=",".join(SWEEP_VARIANTS),
        help=f"comma-separated variants from: {', '.join(SWEEP_VARIANTS)}",
    )
    return parser


class _Settings:
    """CLI values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace, file_values: dict[str, str]):
        self.args = args
        self.file_values = file_values

    def get(self, flag: str, parse, default):
        cli_val = getattr(self.args, flag.replace("-", "_"), None)
        if cli_val is not None:
            return cli_val
        if flag in self.file_values:
            return parse(self.file_values[flag])
        return default

    def get_bool(self, flag: str) -> bool:
        return bool(self.get(flag, lambda raw: _parse_bool(raw, flag), False))


def _parse_seeds(raw) -> tuple[int, ...]:
    if isinstance(raw, tuple):
        return raw
    return tuple(int(s) for s in str(raw).split(",") if s.strip())


def _default_out() -> str:
    return os.environ.get("JOCO_RESULTS_DIR", "results")


def _settings_from(args: argparse.Namespace) -> _Settings:
    file_values = read_config_file(args.config) if args.config else {}
    return _Settings(args, file_values)


def _flags_from(s: _Settings) -> AblationFlags:
    acq = s.get("acquisition", str, "ts")
    return AblationFlags(
        joint_training=not s.get_bool("no-joint-training"),
        update_models=not s.get_bool("no-updates"),
        use_trust_region=not s.get_bool("no-trust-region"),
        outcome_uncertainty=not s.get_bool("no-outcome-uncertainty"),
        reward_uncertainty=not s.get_bool("no-reward-uncertainty"),
        acquisition="mc_ei" if acq == "ei" else "thompson",
    )


def _train_from(s: _Settings) -> TrainConfig:
    return TrainConfig(
        learning_rate=s.get("lr", float, 0.01),
        n_b=s.get("nb", int, 20),
        epochs_update=s.get("epochs-update", int, 1),
    )


def _validate_bo_budget(budget: int, train: TrainConfig) -> str | None:
    if budget < math.ceil(train.init_fraction * budget) + 1:
        return f"budget {budget} leaves no room for model-guided evaluations"
    if init_count(budget, train) < 2:
        return f"budget {budget} gives fewer than 2 initialization points"
    return None


def _cmd_run(args: argparse.Namespace) -> int:
    s = _settings_from(args)
    problem = s.get("problem", str, None)
    method_name = s.get("method", str, None)
    if problem not in problem_names():
        print(f"error: unknown problem {problem!r} (choose from {problem_names()})", file=sys.stderr)
        return 2
    if method_name not in METHOD_NAMES:
        print(f"error: unknown method {method_name!r} (choose from {METHOD_NAMES})", file=sys.stderr)
        return 2
    budget = s.get("budget", int, None)
    seeds = _parse_seeds(s.get("seeds", _parse_seeds, (0,)))
    if budget is None:
        print("error: --budget is required", file=sys.stderr)
        return 2
    train = _train_from(s)
    if method_name != "random":
        problem_err = _validate_bo_budget(budget, train)
        if problem_err:
            print(f"error: {problem_err}", file=sys.stderr)
            return 2
    config = RunConfig(
        problem=problem,
        method=MethodSpec(method_name, _flags_from(s)),
        budget=budget,
        seeds=seeds,
        train=train,
        out_dir=s.get("out", str, _default_out()),
        jobs=s.get("jobs", int, os.cpu_count() or 1),
    )
    return run_many_to_files([config], config.out_dir, config.jobs)


def _cmd_ablate(args: argparse.Namespace) -> int:
    s = _settings_from(args)
    problem = s.get("problem", str, None)
    if problem not in problem_names():
        print(f"error: unknown problem {problem!r} (choose from {problem_names()})", file=sys.stderr)
        return 2
    budget = s.get("budget", int, None)
    if budget is None:
        print("error: --budget is required", file=sys.stderr)
        return 2
    seeds = _parse_seeds(s.get("seeds", _parse_seeds, (0,)))
    sweep = [v.strip() for v in s.get("sweep", str, ",".join(SWEEP_VARIANTS)).split(",") if v.strip()]
    unknown = [v for v in sweep if v not in SWEEP_VARIANTS]
    if unknown:
        print(f"error: unknown sweep variants {unknown} (choose from {list(SWEEP_VARIANTS)})", file=sys.stderr)
        return 2
    out_dir = s.get("out", str, _default_out())
    jobs = s.get("jobs", int, os.cpu_count() or 1)
    base_flags = _flags_from(s)
    train = _train_from(s)
    budget_err = _validate_bo_budget(budget, train)
    if budget_err:
        print(f"error: {budget_err}", file=sys.stderr)
        return 2
    configs = []
    for variant in sweep:
        flags = replace(base_flags, **SWEEP_VARIANTS[variant])
        label = "joco" if variant == "full" else f"joco-{variant}"
        configs.append(
            RunConfig(
                problem=problem,
                method=MethodSpec("joco", flags),
                budget=budget,
                seeds=seeds,
                train=train,
                out_dir=out_dir,
                jobs=jobs,
                method_label=label,
            )
        )
    return run_many_to_files(configs, out_dir, jobs)


def _cmd_aggregate(args: argparse.Namespace) -> int:
    try:
        out = aggregate_dir_to_summary(Path(args.result_dir))
    except MalformedCsvError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    print(out)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    try:
        rows = read_summary(Path(args.summary))
    except (MalformedCsvError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    if not rows:
        print("error: summary has no rows", file=sys.stderr)
        return 3
    out_dir = Path(args.out) if args.out else Path(args.summary).parent
    for path in plot_summary_rows(rows, out_dir):
        print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "aggregate":
        return _cmd_aggregate(args)
    if args.command == "plot":
        return _cmd_plot(args)
    if args.command == "ablate":
        return _cmd_ablate(args)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
