"""Named parameter collections with per-parameter gradient accumulators."""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .tensor import Tensor


class Param:
    """One trainable array plus its gradient accumulator of equal shape."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name: str, value):
        self.name = name
        self.value = np.array(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    def __repr__(self) -> str:
        return f"Param({self.name!r}, shape={self.value.shape})"


class ParamSet:
    """Ordered mapping of names to Params.

    Iteration order is the insertion order, which makes optimizer state and
    gradient dictionaries deterministic. Merged sets share the underlying
    Param objects, so in-place updates are visible to every view.
    """

    def __init__(self):
        self._entries: dict[str, Param] = {}

    def add(self, name: str, value) -> Param:
        if name in self._entries:
            raise ValueError(f"duplicate parameter name: {name}")
        p = Param(name, value)
        self._entries[name] = p
        return p

    def add_param(self, name: str, param: Param) -> None:
        if name in self._entries:
            raise ValueError(f"duplicate parameter name: {name}")
        self._entries[name] = param

    @classmethod
    def merged(cls, groups: Iterable[tuple[str, "ParamSet"]]) -> "ParamSet":
        """Combine several sets under prefixes, sharing Param objects."""
        out = cls()
        for prefix, ps in groups:
            for key, p in ps.items():
                out.add_param(f"{prefix}.{key}", p)
        return out

    def items(self) -> Iterator[tuple[str, Param]]:
        return iter(self._entries.items())

    def names(self) -> list[str]:
        return list(self._entries)

    def __iter__(self) -> Iterator[Param]:
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, name: str) -> Param:
        return self._entries[name]

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def zero_grads(self) -> None:
        for p in self:
            p.grad[...] = 0.0

    def copy_values(self) -> dict[str, np.ndarray]:
        return {k: p.value.copy() for k, p in self.items()}

    def set_values(self, values: dict[str, np.ndarray]) -> None:
        for k, p in self.items():
            p.value[...] = values[k]


def as_tensor(param: Param, leaves: dict[Param, Tensor] | None) -> Tensor:
    """The leaf tensor for a param if it is being trained, else a constant."""
    if leaves is not None and param in leaves:
        return leaves[param]
    return Tensor(param.value)
