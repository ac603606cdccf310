"""Feed-forward encoders used as deep-kernel feature maps.

Hidden layers use tanh, the final layer is linear, so an all-zero network
maps every input to the final-layer bias.
"""

from __future__ import annotations

import math

import numpy as np

from ..numgrad import ParamSet, Tensor, as_tensor, matmul, tanh
from ..rng import CounterRng


class MlpEncoder:
    """An MLP with layer widths [d_in, hidden..., d_out].

    Weights are initialized uniform on (-1/sqrt(fan_in), 1/sqrt(fan_in))
    from the provided stream (zeros when no stream is given); biases start
    at zero. Parameters live in `self.params` with names w0, b0, w1, ...
    """

    def __init__(self, widths: list[int], rng: CounterRng | None = None):
        if len(widths) < 2 or any(w < 1 for w in widths):
            raise ValueError(f"invalid encoder widths: {widths}")
        self.widths = [int(w) for w in widths]
        self.params = ParamSet()
        self._layers = []
        for k in range(len(self.widths) - 1):
            fan_in, fan_out = self.widths[k], self.widths[k + 1]
            if rng is None:
                w = np.zeros((fan_in, fan_out))
            else:
                bound = 1.0 / math.sqrt(fan_in)
                u = rng.uniforms(fan_in * fan_out).reshape(fan_in, fan_out)
                w = (2.0 * u - 1.0) * bound
            wp = self.params.add(f"w{k}", w)
            bp = self.params.add(f"b{k}", np.zeros(fan_out))
            self._layers.append((wp, bp))

    @property
    def in_dim(self) -> int:
        return self.widths[0]

    @property
    def out_dim(self) -> int:
        return self.widths[-1]

    def forward(self, x, leaves=None) -> Tensor:
        """Encode a batch of rows; (n, d_in) -> (n, d_out).

        Row i of the output depends only on row i of the input. Passing the
        `leaves` mapping from value_and_grad makes the pass differentiable
        with respect to this encoder's parameters.
        """
        t = x if isinstance(x, Tensor) else Tensor(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        if t.data.ndim != 2 or t.data.shape[1] != self.in_dim:
            raise ValueError("encoder width mismatch")
        last = len(self._layers) - 1
        for k, (wp, bp) in enumerate(self._layers):
            t = matmul(t, as_tensor(wp, leaves)) + as_tensor(bp, leaves)
            if k != last:
                t = tanh(t)
        return t


def mlp_forward(encoder: MlpEncoder, x, leaves=None) -> Tensor:
    """Functional alias for MlpEncoder.forward."""
    return encoder.forward(x, leaves)
