"""Composite Rosenbrock and Langermann benchmarks.

Both decompose a classic test function into an intermediate map h and a
reward map g, negating the usual minimization objective so larger is
better. Langermann's anchor matrix and weights are fixed constants shipped
with the package (drawn once from seed 1234; see scripts/generate_problem_data.py).
"""

from __future__ import annotations

import math

import numpy as np

from .base import Problem
from .io import load_constant

ROSENBROCK_DIM = 10
LANGERMANN_DIM = 16

_LANGERMANN_A = None
_LANGERMANN_C = None


def _rosenbrock_h(x: np.ndarray) -> np.ndarray:
    # pair (x_{i+1} - x_i^2, 1 - x_i) for each consecutive coordinate pair
    y = np.empty(2 * (x.shape[0] - 1))
    y[0::2] = x[1:] - x[:-1] ** 2
    y[1::2] = 1.0 - x[:-1]
    return y


def _rosenbrock_g(y: np.ndarray) -> float:
    return float(-(100.0 * np.sum(y[0::2] ** 2) + np.sum(y[1::2] ** 2)))


def make_rosenbrock() -> Problem:
    d = ROSENBROCK_DIM
    return Problem(
        name="rosenbrock",
        d=d,
        m=2 * (d - 1),
        lower=np.full(d, -2.0),
        upper=np.full(d, 2.0),
        _h=_rosenbrock_h,
        _g=_rosenbrock_g,
    )


def langermann_constants() -> tuple[np.ndarray, np.ndarray]:
    """Anchor matrix A (60 x 16) and weights c (60,) from the shipped data files."""
    global _LANGERMANN_A, _LANGERMANN_C
    if _LANGERMANN_A is None:
        _LANGERMANN_A = load_constant("langermann_a.txt")
        _LANGERMANN_C = load_constant("langermann_c.txt").reshape(-1)
    return _LANGERMANN_A, _LANGERMANN_C


def _langermann_h(x: np.ndarray) -> np.ndarray:
    a, _ = langermann_constants()
    return np.sum((x[None, :] - a) ** 2, axis=1)


def _langermann_g(y: np.ndarray) -> float:
    _, c = langermann_constants()
    return float(np.sum(c * np.exp(-y / math.pi) * np.cos(math.pi * y)))


def make_langermann() -> Problem:
    a, c = langermann_constants()
    d = LANGERMANN_DIM
    return Problem(
        name="langermann",
        d=d,
        m=a.shape[0],
        lower=np.zeros(d),
        upper=np.full(d, 10.0),
        _h=_langermann_h,
        _g=_langermann_g,
    )
