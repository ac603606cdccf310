"""Run orchestration: budget accounting, replicate execution, persistence.

Every (method, seed) run writes its own CSV; a combined CSV sorted by
(method, problem, seed, iter) is produced at the end, so output bytes do
not depend on worker scheduling. Runs that abort on numerical errors
still persist their partial rows and are listed in failures.txt.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..baselines import MethodSpec, run_random, run_turbo, run_vanilla_bo
from ..core import History, RunAborted, TrainConfig, run_joco
from ..problems import Problem, get_problem
from ..rng import RunRng
from .csvio import ResultRow, write_rows

DEFAULT_N_SAMPLE = {"joco": 1024, "vanilla_bo": 4096, "turbo": 4096}


class BudgetGuard:
    """Wraps a problem and refuses evaluations beyond the run budget."""

    def __init__(self, problem: Problem, budget: int):
        self._problem = problem
        self.budget = budget
        self.count = 0

    def __getattr__(self, name):
        return getattr(self._problem, name)

    def evaluate(self, x):
        if self.count >= self.budget:
            raise RuntimeError("evaluation budget exceeded")
        self.count += 1
        return self._problem.evaluate(x)


@dataclass(frozen=True)
class RunConfig:
    problem: str
    method: MethodSpec
    budget: int
    seeds: tuple[int, ...]
    train: TrainConfig = field(default_factory=TrainConfig)
    out_dir: str = "results"
    jobs: int = 1
    n_sample: int | None = None
    method_label: str | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")

    @property
    def label(self) -> str:
        return self.method_label or self.method.name


def execute_run(
    problem_name: str,
    method: MethodSpec,
    budget: int,
    cfg: TrainConfig,
    seed: int,
    n_sample: int | None = None,
) -> History:
    """One seeded run of one method; raises RunAborted on numerical failure."""
    problem = BudgetGuard(get_problem(problem_name), budget)
    rng = RunRng(seed)
    ns = n_sample or DEFAULT_N_SAMPLE.get(method.name, 1024)
    if method.name == "joco":
        history = run_joco(problem, budget, cfg, method.flags, rng, n_sample=ns)
    elif method.name == "random":
        history = run_random(problem, budget, rng)
    elif method.name == "vanilla_bo":
        history = run_vanilla_bo(problem, budget, cfg, rng, n_sample=ns)
    elif method.name == "turbo":
        history = run_turbo(problem, budget, cfg, rng, n_sample=ns)
    else:  # pragma: no cover - MethodSpec validates
        raise ValueError(f"unknown method: {method.name}")
    assert problem.count == len(history.records)
    return history


def history_rows(label: str, problem: str, seed: int, history: History) -> list[ResultRow]:
    return [
        ResultRow(
            method=label,
            problem=problem,
            seed=seed,
            iter=i,
            f=rec.f,
            best_f=history.best_f[i],
            wall_ms=history.wall_ms[i],
        )
        for i, rec in enumerate(history.records)
    ]


def run_csv_name(label: str, problem: str, seed: int) -> str:
    return f"{label}__{problem}__{seed}.csv"


def _limit_blas_threads() -> None:
    # parallel workers each get one BLAS thread so they do not thrash
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(1)
    except Exception:  # noqa: BLE001 - best effort
        pass


def _run_task(args) -> tuple[int, list[ResultRow], str | None]:
    cfg: RunConfig
    cfg, seed, parallel = args
    if parallel:
        _limit_blas_threads()
    try:
        history = execute_run(
            cfg.problem, cfg.method, cfg.budget, cfg.train, seed, cfg.n_sample
        )
        return seed, history_rows(cfg.label, cfg.problem, seed, history), None
    except RunAborted as err:
        rows = history_rows(cfg.label, cfg.problem, seed, err.history)
        return seed, rows, str(err.cause)


def run_config_to_files(config: RunConfig) -> int:
    """Execute all seeds of a config and write CSVs into config.out_dir.

    Returns 0 on success, 1 if any run aborted (partial CSVs written and
    the run listed in failures.txt).
    """
    return run_many_to_files([config], config.out_dir, config.jobs)


def run_many_to_files(configs: list[RunConfig], out_dir: str, jobs: int) -> int:
    """Execute several configs (e.g. an ablation sweep) into one directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    parallel = jobs > 1
    for cfg in configs:
        for seed in cfg.seeds:
            tasks.append((cfg, seed, parallel))
    if parallel:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]

    failures: list[str] = []
    all_rows: list[ResultRow] = []
    for (cfg, seed, _), (_, rows, failure) in zip(tasks, results):
        write_rows(out / run_csv_name(cfg.label, cfg.problem, seed), rows)
        all_rows.extend(rows)
        if failure is not None:
            failures.append(f"{cfg.label},{cfg.problem},{seed}: {failure}")

    all_rows.sort(key=lambda r: (r.method, r.problem, r.seed, r.iter))
    write_rows(out / "combined.csv", all_rows)
    if failures:
        (out / "failures.txt").write_text("\n".join(failures) + "\n", encoding="utf-8")
        return 1
    return 0
