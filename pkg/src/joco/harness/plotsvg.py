"""Convergence charts as hand-rolled SVG.

The writer emits a fixed-structure document (axes as <line>, one data
<polyline> per method, one +/- SEM band <polygon> per method, legend
<text> entries) with all coordinates printed at fixed precision, so output
bytes are a pure function of the summary rows.
"""

from __future__ import annotations

from pathlib import Path

from .aggregate import SummaryRow

WIDTH, HEIGHT = 640.0, 420.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70.0, 20.0, 40.0, 50.0

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _fmt(x: float) -> str:
    return format(x, ".2f")


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    return [lo + span * k / (n - 1) for k in range(n)]


def render_problem_svg(problem: str, rows: list[SummaryRow]) -> str:
    """SVG text for one problem's mean best-so-far curves with SEM bands."""
    methods = sorted({r.method for r in rows})
    by_method = {
        m: sorted((r for r in rows if r.method == m), key=lambda r: r.iter) for m in methods
    }

    x_min = min(r.iter for r in rows)
    x_max = max(r.iter for r in rows)
    y_vals = [r.mean_best_f - r.sem_best_f for r in rows] + [
        r.mean_best_f + r.sem_best_f for r in rows
    ]
    y_min, y_max = min(y_vals), max(y_vals)
    if y_max == y_min:
        y_min -= 1.0
        y_max += 1.0
    x_span = max(x_max - x_min, 1)

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(it: float) -> float:
        return MARGIN_L + (it - x_min) / x_span * plot_w

    def sy(v: float) -> float:
        return MARGIN_T + (y_max - v) / (y_max - y_min) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(WIDTH)}" height="{int(HEIGHT)}" '
        f'viewBox="0 0 {int(WIDTH)} {int(HEIGHT)}">',
        f'<rect width="{int(WIDTH)}" height="{int(HEIGHT)}" fill="white"/>',
        f'<text x="{_fmt(WIDTH / 2)}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{problem}</text>',
    ]

    # axes
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(WIDTH - MARGIN_R)}" y2="{_fmt(y0)}" '
        'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(MARGIN_T)}" '
        'stroke="black" stroke-width="1"/>'
    )
    for tx in _nice_ticks(x_min, x_max):
        px = sx(tx)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" y2="{_fmt(y0 + 5)}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(y0 + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tx:.0f}</text>'
        )
    for ty in _nice_ticks(y_min, y_max):
        py = sy(ty)
        parts.append(
            f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x0 - 8)}" y="{_fmt(py + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{ty:.4g}</text>'
        )
    parts.append(
        f'<text x="{_fmt(MARGIN_L + plot_w / 2)}" y="{_fmt(HEIGHT - 12)}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">evaluation</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(MARGIN_T + plot_h / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_fmt(MARGIN_T + plot_h / 2)})">best value</text>'
    )

    # SEM bands first so curves draw on top
    for i, m in enumerate(methods):
        color = PALETTE[i % len(PALETTE)]
        pts_hi = [(sx(r.iter), sy(r.mean_best_f + r.sem_best_f)) for r in by_method[m]]
        pts_lo = [(sx(r.iter), sy(r.mean_best_f - r.sem_best_f)) for r in by_method[m]]
        ring = pts_hi + pts_lo[::-1]
        coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in ring)
        parts.append(f'<polygon points="{coords}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
    for i, m in enumerate(methods):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(
            f"{_fmt(sx(r.iter))},{_fmt(sy(r.mean_best_f))}" for r in by_method[m]
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )

    # legend
    for i, m in enumerate(methods):
        color = PALETTE[i % len(PALETTE)]
        ly = MARGIN_T + 14 + 16 * i
        parts.append(
            f'<rect x="{_fmt(MARGIN_L + 10)}" y="{_fmt(ly - 9)}" width="18" height="4" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text class="legend" x="{_fmt(MARGIN_L + 34)}" y="{_fmt(ly)}" '
            f'font-family="sans-serif" font-size="12">{m}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_summary_rows(rows: list[SummaryRow], out_dir: Path) -> list[Path]:
    """One SVG file per problem present in the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for problem in sorted({r.problem for r in rows}):
        svg = render_problem_svg(problem, [r for r in rows if r.problem == problem])
        path = out_dir / f"plot_{problem}.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written
