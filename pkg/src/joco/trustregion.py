"""Trust-region state machine over the unit cube.

The region is an axis-aligned box of side length L centered on the best
point observed so far. Streaks of improving evaluations double L (capped),
streaks of non-improving ones halve it; when L collapses below the minimum
the length is reset while the center and data are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative margin a new value must clear to count as a success.
SUCCESS_RTOL = 1e-3


@dataclass(frozen=True)
class TrConfig:
    l_init: float = 0.8
    l_min: float = 2.0**-7
    l_max: float = 1.6
    tau_succ: int = 3
    tau_fail: int = 32

    def __post_init__(self):
        if not (0.0 < self.l_min < self.l_init <= self.l_max):
            raise ValueError("trust-region lengths must satisfy 0 < l_min < l_init <= l_max")
        if self.tau_succ < 1 or self.tau_fail < 1:
            raise ValueError("success/failure thresholds must be positive")


def default_config(dim: int) -> TrConfig:
    """Dimension-scaled failure threshold, capped so small evaluation
    budgets can still trigger shrinkage on high-dimensional problems."""
    return TrConfig(tau_fail=min(int(np.ceil(dim)), 32))


@dataclass(frozen=True)
class TrState:
    center: np.ndarray  # unit-cube coordinates of the best observed point
    length: float
    success_count: int = 0
    failure_count: int = 0


def initial_state(center: np.ndarray, config: TrConfig) -> TrState:
    return TrState(center=np.asarray(center, dtype=np.float64).copy(), length=config.l_init)


def tr_bounds(state: TrState, config: TrConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """The box [center - L/2, center + L/2] clipped to the unit cube."""
    half = 0.5 * state.length
    lower = np.clip(state.center - half, 0.0, 1.0)
    upper = np.clip(state.center + half, 0.0, 1.0)
    return lower, upper


def tr_update(
    state: TrState,
    f_new: float,
    f_best_prev: float,
    x_new: np.ndarray,
    config: TrConfig,
) -> TrState:
    """Advance the state machine with one new observation.

    A collapsed length (below l_min, left over from an earlier shrink) is
    reset to l_init before the observation is processed. Success means
    clearing f_best_prev by a relative margin; the center moves on any
    plain improvement.
    """
    length = state.length
    succ = state.success_count
    fail = state.failure_count
    if length < config.l_min:
        length = config.l_init
        succ = 0
        fail = 0

    success = f_new > f_best_prev + SUCCESS_RTOL * abs(f_best_prev)
    if success:
        succ += 1
        fail = 0
        if succ >= config.tau_succ:
            length = min(2.0 * length, config.l_max)
            succ = 0
    else:
        fail += 1
        succ = 0
        if fail >= config.tau_fail:
            length = 0.5 * length
            fail = 0

    center = state.center
    if f_new > f_best_prev:
        center = np.asarray(x_new, dtype=np.float64).copy()

    return TrState(center=center, length=length, success_count=succ, failure_count=fail)
