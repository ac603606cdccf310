"""The adaptive trust region in action.

Feeds a scripted streak of improvements and stalls through the state
machine and prints how the box length expands, shrinks, collapses, and
resets.
"""

import numpy as np

from joco.trustregion import TrConfig, initial_state, tr_bounds, tr_update

cfg = TrConfig(tau_succ=3, tau_fail=4)
state = initial_state(np.array([0.5, 0.5]), cfg)
best = 0.0

# three hot streaks, then a long cold spell that collapses the region
script = [True] * 9 + [False] * 40

print("step  event    length    succ fail   box[0]")
for step, success in enumerate(script):
    value = best + 1.0 if success else best - 1.0
    state = tr_update(state, value, best, state.center, cfg)
    best = max(best, value)
    lower, upper = tr_bounds(state, cfg)
    label = "success" if success else "fail"
    print(
        f"{step:4d}  {label:7s}  {state.length:7.4f}   {state.success_count}    {state.failure_count:2d}"
        f"   [{lower[0]:.3f}, {upper[0]:.3f}]"
    )

print("\nlength capped at", cfg.l_max, "and reset to", cfg.l_init, "after collapsing below", cfg.l_min)
