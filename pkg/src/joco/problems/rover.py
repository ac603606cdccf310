"""Rover trajectory planning through an obstacle field.

The 40-d input encodes 20 control points in the unit square. A clamped
uniform cubic B-spline through them is sampled at 500 equally spaced
parameter values; the flattened (x, y) trajectory is the intermediate
output. The reward penalizes time spent inside any of 15 fixed
axis-aligned obstacles plus L1 distance of the endpoints from the start
(0.05, 0.05) and goal (0.95, 0.95).

Obstacles are constants shipped with the package (drawn once from seed
5678 with the start-goal diagonal kept clear; see
scripts/generate_problem_data.py).
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import BSpline

from .base import Problem
from .io import load_constant

ROVER_DIM = 40
N_CONTROL = 20
N_WAYPOINTS = 500
SPLINE_DEGREE = 3
N_OBSTACLES = 15
COLLISION_COST = 20.0
ENDPOINT_WEIGHT = 10.0
START = np.array([0.05, 0.05])
GOAL = np.array([0.95, 0.95])

_OBSTACLES = None  # rows of (cx, cy, w, h)
_EVAL_TS = np.linspace(0.0, 1.0, N_WAYPOINTS)


def rover_obstacles() -> np.ndarray:
    global _OBSTACLES
    if _OBSTACLES is None:
        _OBSTACLES = load_constant("rover_obstacles.txt")
    return _OBSTACLES


def clamped_knots(n_control: int, degree: int) -> np.ndarray:
    interior = np.arange(1, n_control - degree) / (n_control - degree)
    return np.concatenate(
        [np.zeros(degree + 1), interior, np.ones(degree + 1)]
    )


def spline_trajectory(control: np.ndarray) -> np.ndarray:
    """Evaluate the clamped cubic B-spline at 500 equispaced parameters."""
    knots = clamped_knots(N_CONTROL, SPLINE_DEGREE)
    spline = BSpline(knots, control, SPLINE_DEGREE)
    return spline(_EVAL_TS)


def _in_obstacle(points: np.ndarray) -> np.ndarray:
    obs = rover_obstacles()
    dx = np.abs(points[:, None, 0] - obs[None, :, 0])
    dy = np.abs(points[:, None, 1] - obs[None, :, 1])
    hit = (dx <= obs[None, :, 2] / 2.0) & (dy <= obs[None, :, 3] / 2.0)
    return hit.any(axis=1)


def _rover_h(x: np.ndarray) -> np.ndarray:
    control = x.reshape(N_CONTROL, 2)
    return spline_trajectory(control).reshape(-1)


def _rover_g(y: np.ndarray) -> float:
    traj = y.reshape(N_WAYPOINTS, 2)
    collision = COLLISION_COST * float(np.mean(_in_obstacle(traj)))
    endpoints = float(
        np.sum(np.abs(traj[0] - START)) + np.sum(np.abs(traj[-1] - GOAL))
    )
    return -(collision + ENDPOINT_WEIGHT * endpoints)


def make_rover() -> Problem:
    return Problem(
        name="rover",
        d=ROVER_DIM,
        m=2 * N_WAYPOINTS,
        lower=np.zeros(ROVER_DIM),
        upper=np.ones(ROVER_DIM),
        _h=_rover_h,
        _g=_rover_g,
    )
