"""Reverse-mode autodiff over immutable float64 arrays.

Every operation validates that its result is finite and records
vector-Jacobian closures on the output node. `backward` walks the graph
in reverse topological order; `value_and_grad` is the high-level entry
point used by the training loops.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import linalg
from .errors import NumericalOverflowError


class Tensor:
    """A node in the computation graph wrapping a float64 ndarray.

    Tensors are immutable once created; building an op returns a fresh
    node holding references to its parents and their vjp closures.
    """

    __slots__ = ("data", "requires_grad", "info", "_parents", "_vjps")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        self.data = arr
        self.requires_grad = requires_grad
        self.info: dict | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._vjps: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        return float(self.data)

    def __float__(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape})"

    # operator sugar; scalars are wrapped as constants
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __neg__(self):
        return mul(self, _wrap(-1.0))

    def __matmul__(self, other):
        return matmul(self, _wrap(other))


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(data: np.ndarray, parents: tuple[Tensor, ...], vjps: tuple) -> Tensor:
    if not np.all(np.isfinite(data)):
        raise NumericalOverflowError()
    out = Tensor(data)
    out._parents = parents
    out._vjps = vjps
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = a.data + b.data
    return _node(
        out,
        (a, b),
        (lambda g: _unbroadcast(g, a.data.shape), lambda g: _unbroadcast(g, b.data.shape)),
    )


def sub(a: Tensor, b: Tensor) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = a.data - b.data
    return _node(
        out,
        (a, b),
        (lambda g: _unbroadcast(g, a.data.shape), lambda g: _unbroadcast(-g, b.data.shape)),
    )


def mul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    out = a.data * b.data
    return _node(
        out,
        (a, b),
        (
            lambda g: _unbroadcast(g * b.data, a.data.shape),
            lambda g: _unbroadcast(g * a.data, b.data.shape),
        ),
    )


def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise ValueError("matmul expects 2-D operands")
    out = a.data @ b.data
    return _node(out, (a, b), (lambda g: g @ b.data.T, lambda g: a.data.T @ g))


def transpose(a: Tensor) -> Tensor:
    a = _wrap(a)
    return _node(a.data.T.copy(), (a,), (lambda g: g.T,))


def tanh(a: Tensor) -> Tensor:
    a = _wrap(a)
    out = np.tanh(a.data)
    return _node(out, (a,), (lambda g: g * (1.0 - out * out),))


def relu(a: Tensor) -> Tensor:
    a = _wrap(a)
    mask = a.data > 0.0
    return _node(np.where(mask, a.data, 0.0), (a,), (lambda g: g * mask,))


def exp(a: Tensor) -> Tensor:
    a = _wrap(a)
    out = np.exp(a.data)
    return _node(out, (a,), (lambda g: g * out,))


def log(a: Tensor) -> Tensor:
    a = _wrap(a)
    out = np.log(a.data)
    return _node(out, (a,), (lambda g: g / a.data,))


def tsum(a: Tensor, axis: int | None = None, keepdims: bool = False) -> Tensor:
    a = _wrap(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return np.full(a.data.shape, g)
        gg = g if keepdims else np.expand_dims(g, axis)
        return np.broadcast_to(gg, a.data.shape)

    return _node(np.asarray(out), (a,), (vjp,))


def diag_part(a: Tensor) -> Tensor:
    a = _wrap(a)
    if a.data.ndim != 2 or a.data.shape[0] != a.data.shape[1]:
        raise ValueError("diag_part expects a square matrix")
    return _node(np.diag(a.data).copy(), (a,), (lambda g: np.diag(g),))


def column(a: Tensor, j: int) -> Tensor:
    """Column j of a matrix as an (n, 1) tensor."""
    a = _wrap(a)
    if a.data.ndim != 2:
        raise ValueError("column expects a 2-D tensor")
    out = a.data[:, j : j + 1].copy()

    def vjp(g):
        full = np.zeros_like(a.data)
        full[:, j : j + 1] = g
        return full

    return _node(out, (a,), (vjp,))


def cholesky(a: Tensor) -> Tensor:
    """Lower Cholesky factor of a symmetric PD matrix, with jitter ladder.

    The applied jitter is recorded on the output node as info["jitter"]
    and is treated as a constant by the backward pass.
    """
    a = _wrap(a)
    low, jitter = linalg.stable_cholesky(a.data)
    n = low.shape[0]

    def vjp(g):
        mid = np.tril(low.T @ g)
        mid[np.diag_indices(n)] *= 0.5
        linv = linalg.solve_lower(low, np.eye(n))
        grad = linv.T @ mid @ linv
        return 0.5 * (grad + grad.T)

    out = _node(low, (a,), (vjp,))
    out.info = {"jitter": jitter}
    return out


def triangular_solve(l: Tensor, b: Tensor, lower: bool = True) -> Tensor:
    """Solve the triangular system l @ x = b.

    Only the relevant triangle of `l` participates, so the gradient of the
    opposite triangle is exactly zero.
    """
    l, b = _wrap(l), _wrap(b)
    if b.data.ndim != 2:
        raise ValueError("triangular_solve expects a 2-D right-hand side")
    tri = np.tril(l.data) if lower else np.triu(l.data)
    x = (linalg.solve_lower if lower else linalg.solve_upper)(tri, b.data)

    def vjp_b(g):
        return (linalg.solve_upper if lower else linalg.solve_lower)(tri.T, g)

    def vjp_l(g):
        gb = (linalg.solve_upper if lower else linalg.solve_lower)(tri.T, g)
        full = -gb @ x.T
        return np.tril(full) if lower else np.triu(full)

    return _node(x, (l, b), (vjp_l, vjp_b))


def backward(root: Tensor) -> dict[int, np.ndarray]:
    """Reverse-mode sweep from a scalar root.

    Returns a mapping id(tensor) -> gradient array for every node that the
    root depends on. The traversal order is a deterministic function of
    graph construction order.
    """
    if root.data.size != 1:
        raise ValueError("backward expects a scalar root")
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    grads: dict[int, np.ndarray] = {id(root): np.ones_like(root.data)}
    for node in reversed(topo):
        g = grads.get(id(node))
        if g is None:
            continue
        for parent, vjp in zip(node._parents, node._vjps):
            contrib = vjp(g)
            prev = grads.get(id(parent))
            grads[id(parent)] = contrib if prev is None else prev + contrib
    return grads


def value_and_grad(fn, params) -> tuple[float, dict[str, np.ndarray]]:
    """Evaluate a scalar loss and fill the gradient accumulators of `params`.

    `fn` receives a mapping from each Param object to a fresh leaf Tensor
    and must return a scalar Tensor. Parameters that do not appear in the
    graph get an exactly-zero gradient. Returns (loss value, {name: grad}).
    """
    leaves = {p: Tensor(p.value, requires_grad=True) for p in params}
    out = fn(leaves)
    if not isinstance(out, Tensor) or out.data.size != 1:
        raise ValueError("loss expression must evaluate to a scalar Tensor")
    gmap = backward(out)
    result: dict[str, np.ndarray] = {}
    for key, p in params.items():
        g = gmap.get(id(leaves[p]))
        if g is None:
            p.grad[...] = 0.0
        else:
            p.grad[...] = np.asarray(g, dtype=np.float64).reshape(p.value.shape)
        result[key] = p.grad
    return float(out.data), result
