"""Replicate orchestration: runs, aggregation, and SVG convergence charts.

Drives the same machinery as the `joco` command line: several seeded runs
per method, per-run CSVs plus a combined CSV, a mean +/- SEM summary, and
one deterministic SVG chart per problem.

Equivalent shell session:

    joco run --problem environmental --method random --budget 40 --seeds 1,2,3 --out demo_results
    joco run --problem environmental --method turbo  --budget 40 --seeds 1,2,3 --out demo_results
    joco aggregate demo_results
    joco plot demo_results/summary.csv
"""

import tempfile
from pathlib import Path

from joco.baselines import MethodSpec
from joco.core import TrainConfig
from joco.harness.aggregate import aggregate_dir_to_summary, read_summary
from joco.harness.plotsvg import plot_summary_rows
from joco.harness.runner import RunConfig, run_many_to_files

out = Path(tempfile.mkdtemp(prefix="joco_demo_"))
train = TrainConfig(epochs_init=10)

configs = [
    RunConfig(problem="environmental", method=MethodSpec(name), budget=40,
              seeds=(1, 2, 3), train=train, out_dir=str(out), n_sample=256)
    for name in ("random", "turbo")
]
code = run_many_to_files(configs, str(out), jobs=2)
assert code == 0

print("run CSVs:")
for p in sorted(out.glob("*.csv")):
    print("  ", p.name)

summary_path = aggregate_dir_to_summary(out)
rows = read_summary(summary_path)
print(f"\nsummary rows: {len(rows)} (methods x iterations)")
final = {r.method: r for r in rows if r.iter == 39}
for method, row in sorted(final.items()):
    print(f"  {method:8s} final mean best = {row.mean_best_f:.5f} +/- {row.sem_best_f:.5f} (n={row.n})")

for svg in plot_summary_rows(rows, out):
    print(f"\nwrote {svg}")
