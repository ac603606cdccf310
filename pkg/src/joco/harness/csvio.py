"""Result-row CSV format.

One row per evaluation with header
`method,problem,seed,iter,f,best_f,wall_ms`; floats carry 17 significant
digits so parsing them back is lossless. wall_ms is timing telemetry and
is excluded from determinism comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

RUN_HEADER = "method,problem,seed,iter,f,best_f,wall_ms"
SUMMARY_HEADER = "method,problem,iter,mean_best_f,sem_best_f,n"


class MalformedCsvError(ValueError):
    def __init__(self, path, detail: str):
        super().__init__(f"malformed CSV {path}: {detail}")
        self.path = str(path)


@dataclass(frozen=True)
class ResultRow:
    method: str
    problem: str
    seed: int
    iter: int
    f: float
    best_f: float
    wall_ms: float


def fmt(x: float) -> str:
    return format(x, ".17g")


def format_row(row: ResultRow) -> str:
    return (
        f"{row.method},{row.problem},{row.seed},{row.iter},"
        f"{fmt(row.f)},{fmt(row.best_f)},{fmt(row.wall_ms)}"
    )


def write_rows(path: Path, rows: list[ResultRow]) -> None:
    lines = [RUN_HEADER]
    lines.extend(format_row(r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_rows(path: Path) -> list[ResultRow]:
    text = Path(path).read_text(encoding="ascii")
    lines = text.strip().splitlines()
    if not lines or lines[0] != RUN_HEADER:
        raise MalformedCsvError(path, "missing or wrong header")
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 7:
            raise MalformedCsvError(path, f"line {k}: expected 7 fields")
        try:
            rows.append(
                ResultRow(
                    method=parts[0],
                    problem=parts[1],
                    seed=int(parts[2]),
                    iter=int(parts[3]),
                    f=float(parts[4]),
                    best_f=float(parts[5]),
                    wall_ms=float(parts[6]),
                )
            )
        except ValueError as err:
            raise MalformedCsvError(path, f"line {k}: {err}") from None
    return rows


def strip_wall_column(text: str) -> str:
    """Drop the wall_ms field from every line (for determinism comparisons)."""
    out = []
    for line in text.strip().splitlines():
        out.append(line.rsplit(",", 1)[0])
    return "\n".join(out) + "\n"
