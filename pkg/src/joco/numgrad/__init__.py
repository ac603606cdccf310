"""Dense float64 tensors with a small reverse-mode gradient engine.

The engine supports exactly the primitives needed to differentiate
marginal-likelihood losses of deep-kernel Gaussian processes: broadcast
add/multiply, matmul, tanh/relu/exp/log, reductions, Cholesky
factorization and triangular solves.
"""

from .errors import NotPositiveDefiniteError, NumericalOverflowError
from .linalg import stable_cholesky
from .params import Param, ParamSet, as_tensor
from .tensor import (
    Tensor,
    add,
    backward,
    cholesky,
    column,
    constant,
    diag_part,
    exp,
    log,
    matmul,
    mul,
    relu,
    tanh,
    transpose,
    triangular_solve,
    tsum,
    value_and_grad,
)

__all__ = [
    "NotPositiveDefiniteError",
    "NumericalOverflowError",
    "Param",
    "ParamSet",
    "Tensor",
    "add",
    "as_tensor",
    "backward",
    "cholesky",
    "column",
    "constant",
    "diag_part",
    "exp",
    "log",
    "matmul",
    "mul",
    "relu",
    "stable_cholesky",
    "tanh",
    "transpose",
    "triangular_solve",
    "tsum",
    "value_and_grad",
]
