"""Aggregation of per-run CSVs into mean +/- SEM convergence summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .csvio import SUMMARY_HEADER, MalformedCsvError, ResultRow, fmt, read_rows

_SKIP_NAMES = {"combined.csv", "summary.csv"}


@dataclass(frozen=True)
class SummaryRow:
    method: str
    problem: str
    iter: int
    mean_best_f: float
    sem_best_f: float
    n: int


def aggregate_rows(rows: list[ResultRow]) -> list[SummaryRow]:
    """Mean and SEM of best-so-far per (method, problem, iter).

    SEM uses the sample standard deviation (ddof = 1) divided by the square
    root of the replicate count, and is defined as 0 for a single replicate.
    """
    groups: dict[tuple[str, str, int], list[float]] = {}
    for r in rows:
        groups.setdefault((r.method, r.problem, r.iter), []).append(r.best_f)
    out = []
    for (method, problem, it), values in sorted(groups.items()):
        n = len(values)
        mean = sum(values) / n
        if n > 1:
            var = sum((v - mean) ** 2 for v in values) / (n - 1)
            sem = math.sqrt(var) / math.sqrt(n)
        else:
            sem = 0.0
        out.append(SummaryRow(method, problem, it, mean, sem, n))
    return out


def read_result_dir(result_dir: Path) -> list[ResultRow]:
    """All rows from the per-run CSVs in a directory (combined/summary skipped)."""
    result_dir = Path(result_dir)
    paths = sorted(
        p for p in result_dir.glob("*.csv") if p.name not in _SKIP_NAMES
    )
    if not paths:
        raise MalformedCsvError(result_dir, "no run CSV files found")
    rows: list[ResultRow] = []
    for p in paths:
        rows.extend(read_rows(p))
    return rows


def write_summary(path: Path, rows: list[SummaryRow]) -> None:
    lines = [SUMMARY_HEADER]
    for r in rows:
        lines.append(
            f"{r.method},{r.problem},{r.iter},{fmt(r.mean_best_f)},{fmt(r.sem_best_f)},{r.n}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_summary(path: Path) -> list[SummaryRow]:
    lines = Path(path).read_text(encoding="ascii").strip().splitlines()
    if not lines or lines[0] != SUMMARY_HEADER:
        raise MalformedCsvError(path, "missing or wrong summary header")
    out = []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 6:
            raise MalformedCsvError(path, f"line {k}: expected 6 fields")
        try:
            out.append(
                SummaryRow(
                    method=parts[0],
                    problem=parts[1],
                    iter=int(parts[2]),
                    mean_best_f=float(parts[3]),
                    sem_best_f=float(parts[4]),
                    n=int(parts[5]),
                )
            )
        except ValueError as err:
            raise MalformedCsvError(path, f"line {k}: {err}") from None
    return out


def aggregate_dir_to_summary(result_dir: Path) -> Path:
    rows = read_result_dir(result_dir)
    summary = aggregate_rows(rows)
    out_path = Path(result_dir) / "summary.csv"
    write_summary(out_path, summary)
    return out_path
