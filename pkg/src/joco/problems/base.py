"""Composite benchmark problems: x -> (y, f) with f = g(y) by construction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_DOMAIN_ATOL = 1e-9


class DomainError(ValueError):
    def __init__(self):
        super().__init__("input outside domain")


@dataclass(frozen=True)
class Problem:
    """A composite objective exposing its intermediate outputs.

    `evaluate` returns (y, f) where y is the m-dimensional intermediate
    output and f the scalar reward (maximization convention). `reward`
    recomputes f from y alone, so f == reward(y) holds by construction.
    """

    name: str
    d: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    _h: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _g: Callable[[np.ndarray], float] = field(repr=False)

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.d or not np.all(np.isfinite(x)):
            raise DomainError()
        if np.any(x < self.lower - _DOMAIN_ATOL) or np.any(x > self.upper + _DOMAIN_ATOL):
            raise DomainError()
        y = np.asarray(self._h(x), dtype=np.float64).reshape(-1)
        return y, float(self._g(y))

    def reward(self, y: np.ndarray) -> float:
        """The outcome-to-reward map applied to an intermediate output."""
        return float(self._g(np.asarray(y, dtype=np.float64).reshape(-1)))

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=np.float64) * (self.upper - self.lower)
