"""Regenerate the checked-in problem constants and their manifest.

The shipped files are normative; this script documents how they were
produced and reproduces them bit-for-bit.

Langermann (stream seed 1234, tag "langermann"): the first 960 uniforms,
scaled to [0, 10], fill the 60 x 16 anchor matrix A row-major; the next 60,
scaled to [0.5, 5], form the weight vector c.

Rover obstacles (stream seed 5678, tag "rover-obstacles"): rectangles are
drawn sequentially as (cx, cy, w, h) with centers uniform on [0.1, 0.9]^2
and widths/heights uniform on [0.05, 0.15]. A rectangle whose 0.01-inflated
extent touches the start-goal diagonal segment from (0.05, 0.05) to
(0.95, 0.95) is discarded and redrawn, so a straight start-to-goal path is
always collision-free. Drawing stops after 15 accepted rectangles.
"""

from pathlib import Path

import numpy as np

from joco.problems import io
from joco.rng import CounterRng

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "joco" / "problems" / "data"

DIAG_LO, DIAG_HI = 0.05, 0.95
DIAG_MARGIN = 0.01


def langermann_constants() -> tuple[np.ndarray, np.ndarray]:
    stream = CounterRng(1234, "langermann")
    a = stream.uniforms(60 * 16).reshape(60, 16) * 10.0
    c = 0.5 + stream.uniforms(60) * 4.5
    return a, c


def _touches_diagonal(cx: float, cy: float, w: float, h: float) -> bool:
    x0, x1 = cx - w / 2 - DIAG_MARGIN, cx + w / 2 + DIAG_MARGIN
    y0, y1 = cy - h / 2 - DIAG_MARGIN, cy + h / 2 + DIAG_MARGIN
    lo = max(x0, y0, DIAG_LO)
    hi = min(x1, y1, DIAG_HI)
    return lo <= hi


def rover_obstacles() -> np.ndarray:
    stream = CounterRng(5678, "rover-obstacles")
    rects = []
    while len(rects) < 15:
        u = stream.uniforms(4)
        cx, cy = 0.1 + 0.8 * u[0], 0.1 + 0.8 * u[1]
        w, h = 0.05 + 0.1 * u[2], 0.05 + 0.1 * u[3]
        if _touches_diagonal(cx, cy, w, h):
            continue
        rects.append((cx, cy, w, h))
    return np.array(rects)


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    a, c = langermann_constants()
    obstacles = rover_obstacles()

    files = {
        "langermann_a.txt": ("langermann_a", a),
        "langermann_c.txt": ("langermann_c", c.reshape(-1, 1)),
        "rover_obstacles.txt": ("rover_obstacles", obstacles),
    }
    manifest_lines = []
    for fname, (label, values) in files.items():
        text = io.format_matrix(label, values)
        (DATA_DIR / fname).write_text(text, encoding="ascii")
        manifest_lines.append(f"{io.sha256_text(text)}  {fname}")
        print(f"wrote {fname} ({values.shape[0]} x {values.shape[1]})")
    (DATA_DIR / io.MANIFEST_NAME).write_text("\n".join(manifest_lines) + "\n", encoding="ascii")
    print(f"wrote {io.MANIFEST_NAME}")


if __name__ == "__main__":
    main()
