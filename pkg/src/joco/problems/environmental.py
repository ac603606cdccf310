"""Pollutant-concentration calibration in an infinite 1-D channel.

Two spills of mass M diffuse with rate D; the second happens at location
L and time tau. The intermediate output is the concentration on a fixed
4 x 4 (location, time) grid; the reward is the negative squared distance
to the grid produced by the true parameters. Only the first four input
coordinates matter; the remaining eleven are inert.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Problem

ENV_DIM = 15

# affine parameter ranges for the first four coordinates
_M_RANGE = (7.0, 13.0)
_D_RANGE = (0.02, 0.12)
_L_RANGE = (0.01, 3.0)
_TAU_RANGE = (30.01, 30.295)

_TRUE_PARAMS = (10.0, 0.07, 1.505, 30.1525)

_S_GRID = np.array([0.0, 0.5, 1.0, 2.5])
_T_GRID = np.array([15.0, 30.0, 45.0, 60.0])


def _concentration(m: float, d: float, loc: float, tau: float) -> np.ndarray:
    """Concentration on the grid, ordered location-major then time."""
    s = _S_GRID[:, None]
    t = _T_GRID[None, :]
    c = m / np.sqrt(4.0 * math.pi * d * t) * np.exp(-(s**2) / (4.0 * d * t))
    after = t > tau
    dt = np.where(after, t - tau, 1.0)
    second = m / np.sqrt(4.0 * math.pi * d * dt) * np.exp(-((s - loc) ** 2) / (4.0 * d * dt))
    c = c + np.where(after, second, 0.0)
    return c.reshape(-1)


_TARGET_GRID = _concentration(*_TRUE_PARAMS)


def _params_from_x(x: np.ndarray) -> tuple[float, float, float, float]:
    ranges = (_M_RANGE, _D_RANGE, _L_RANGE, _TAU_RANGE)
    return tuple(lo + x[i] * (hi - lo) for i, (lo, hi) in enumerate(ranges))


def _env_h(x: np.ndarray) -> np.ndarray:
    return _concentration(*_params_from_x(x))


def _env_g(y: np.ndarray) -> float:
    return float(-np.sum((y - _TARGET_GRID) ** 2))


def make_environmental() -> Problem:
    return Problem(
        name="environmental",
        d=ENV_DIM,
        m=_S_GRID.size * _T_GRID.size,
        lower=np.zeros(ENV_DIM),
        upper=np.ones(ENV_DIM),
        _h=_env_h,
        _g=_env_g,
    )
