"""Benchmark problem registry."""

from .base import DomainError, Problem
from .environmental import make_environmental
from .rover import make_rover
from .synthetic import make_langermann, make_rosenbrock

_REGISTRY = {
    "rosenbrock": make_rosenbrock,
    "langermann": make_langermann,
    "environmental": make_environmental,
    "rover": make_rover,
}


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> Problem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem: {name!r} (choose from {problem_names()})") from None
    return factory()


__all__ = ["DomainError", "Problem", "get_problem", "problem_names"]
