"""Exact Gaussian-process regression with ARD RBF kernels.

Single-output GPs carry their own hyperparameters; the multi-output
variant is a list of independent single-output heads sharing one
training-input matrix. Marginal likelihoods are built on the autodiff
graph so encoder parameters upstream of the inputs receive gradients;
posterior queries on frozen models run in plain numpy.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from ..numgrad import (
    ParamSet,
    Tensor,
    as_tensor,
    cholesky,
    column,
    diag_part,
    exp,
    log,
    matmul,
    relu,
    transpose,
    triangular_solve,
    tsum,
)
from ..numgrad import linalg
from ..rng import CounterRng

NOISE_FLOOR = 1e-6

LOG_TWO_PI = math.log(2.0 * math.pi)


class GpHyperparams:
    """Log-parameterized kernel hyperparameters and a constant mean.

    Fields: per-dimension log-lengthscales, log signal variance, log noise
    variance, constant mean. The effective noise variance is floored at
    NOISE_FLOOR so the kernel matrix stays invertible.
    """

    def __init__(self, input_dim: int):
        self.input_dim = int(input_dim)
        self.params = ParamSet()
        self.log_lengthscales = self.params.add("log_lengthscales", np.zeros(input_dim))
        self.log_signal_var = self.params.add("log_signal_var", 0.0)
        self.log_noise_var = self.params.add("log_noise_var", math.log(1e-2))
        self.mean_const = self.params.add("mean_const", 0.0)

    # numpy accessors mirror the graph arithmetic exactly
    def lengthscales(self) -> np.ndarray:
        return np.exp(self.log_lengthscales.value)

    def signal_var(self) -> float:
        return float(np.exp(self.log_signal_var.value))

    def noise_var(self) -> float:
        raw = float(np.exp(self.log_noise_var.value))
        return max(raw - NOISE_FLOOR, 0.0) + NOISE_FLOOR

    def mean(self) -> float:
        return float(self.mean_const.value)

    def noise_var_t(self, leaves=None) -> Tensor:
        raw = exp(as_tensor(self.log_noise_var, leaves))
        return relu(raw - NOISE_FLOOR) + NOISE_FLOOR


def rbf_kernel(hyp: GpHyperparams, a, b, leaves=None) -> Tensor:
    """ARD RBF kernel matrix K[i, j] = s2 * exp(-0.5 * sum_k ((a_ik - b_jk) / l_k)^2)."""
    ta = a if isinstance(a, Tensor) else Tensor(np.atleast_2d(a))
    tb = b if isinstance(b, Tensor) else Tensor(np.atleast_2d(b))
    if ta.data.shape[1] != hyp.input_dim or tb.data.shape[1] != hyp.input_dim:
        raise ValueError("kernel input width does not match lengthscale count")
    inv_ls = exp(-as_tensor(hyp.log_lengthscales, leaves))
    sa = ta * inv_ls
    sb = tb * inv_ls
    a2 = tsum(sa * sa, axis=1, keepdims=True)
    b2 = tsum(sb * sb, axis=1, keepdims=True)
    d2 = a2 + transpose(b2) - 2.0 * matmul(sa, transpose(sb))
    return exp(as_tensor(hyp.log_signal_var, leaves)) * exp(-0.5 * d2)


def rbf_matrix(hyp: GpHyperparams, a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Same kernel for frozen queries, computed without the graph.

    Used on the posterior path where no gradients are needed; agreement
    with `rbf_kernel` is pinned by tests.
    """
    ls = hyp.lengthscales()
    sa = np.atleast_2d(a) / ls
    sb = sa if b is None else np.atleast_2d(b) / ls
    d2 = cdist(sa, sb, "sqeuclidean")
    np.multiply(d2, -0.5, out=d2)
    np.exp(d2, out=d2)
    sf2 = hyp.signal_var()
    if sf2 != 1.0:
        np.multiply(d2, sf2, out=d2)
    return d2


def _symmetrize(cov: np.ndarray) -> np.ndarray:
    t = cov.T.copy()
    cov += t
    cov *= 0.5
    return cov


class PosteriorGaussian:
    """Multivariate normal over q latent function values."""

    def __init__(self, mean: np.ndarray, cov: np.ndarray):
        self.mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        self.cov = _symmetrize(np.array(cov, dtype=np.float64))
        self._chol: np.ndarray | None = None
        self._singular = False

    @classmethod
    def _owned(
        cls, mean: np.ndarray, cov: np.ndarray, singular: bool = False
    ) -> "PosteriorGaussian":
        """Internal fast path: `cov` is freshly built kernel algebra that is
        already symmetric to rounding, so skip the defensive copy. `singular`
        marks covariances known to be rank-deficient to rounding."""
        obj = cls.__new__(cls)
        obj.mean = mean
        obj.cov = cov
        obj._chol = None
        obj._singular = singular
        return obj

    def affine(self, scale: float, shift: float) -> "PosteriorGaussian":
        out = PosteriorGaussian._owned(self.mean * scale + shift, self.cov * (scale * scale))
        out._singular = self._singular
        return out

    def _factor(self) -> np.ndarray:
        if self._chol is None:
            self._chol, _ = linalg.stable_cholesky(
                self.cov, check_symmetric=False, assume_singular=self._singular
            )
        return self._chol

    def sample(self, rng: CounterRng) -> np.ndarray:
        eps = rng.normals(self.mean.shape[0])
        return self.mean + self._factor() @ eps


class MultiPosterior:
    """Per-head posteriors over a shared query set: mean (q, m), one q x q cov per head."""

    def __init__(self, mean: np.ndarray, covs: list[np.ndarray]):
        self.mean = np.asarray(mean, dtype=np.float64)
        self.covs = [_symmetrize(np.array(c, dtype=np.float64)) for c in covs]
        self._chols: list[np.ndarray] | None = None
        self._singular = False

    @classmethod
    def _owned(
        cls, mean: np.ndarray, covs: list[np.ndarray], singular: bool = False
    ) -> "MultiPosterior":
        obj = cls.__new__(cls)
        obj.mean = mean
        obj.covs = covs
        obj._chols = None
        obj._singular = singular
        return obj

    def _factors(self) -> list[np.ndarray]:
        if self._chols is None:
            self._chols = [
                linalg.stable_cholesky(c, check_symmetric=False, assume_singular=self._singular)[0]
                for c in self.covs
            ]
        return self._chols

    def sample(self, rng: CounterRng) -> np.ndarray:
        out = np.empty_like(self.mean)
        q = self.mean.shape[0]
        for j, low in enumerate(self._factors()):
            out[:, j] = self.mean[:, j] + low @ rng.normals(q)
        return out


class ExactGp:
    """Exact GP regressor with constant mean and ARD RBF kernel.

    Conditioning data is swapped out with `condition`; the Cholesky factor
    of the train covariance is cached until then. `index` gives heads a
    stable identity inside a MultiOutputGp.
    """

    def __init__(self, input_dim: int, index: int = 0):
        self.hyp = GpHyperparams(input_dim)
        self.index = index
        self.train_inputs: np.ndarray | None = None
        self.train_targets: np.ndarray | None = None
        self._factor = None

    @property
    def n_train(self) -> int:
        return 0 if self.train_inputs is None else self.train_inputs.shape[0]

    def condition(self, inputs: np.ndarray, targets: np.ndarray) -> None:
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        targets = np.asarray(targets, dtype=np.float64).reshape(-1)
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError("conditioning inputs/targets row mismatch")
        self.train_inputs = inputs
        self.train_targets = targets
        self._factor = None

    def clear(self) -> None:
        self.train_inputs = None
        self.train_targets = None
        self._factor = None

    def mll(self, inputs=None, targets=None, leaves=None) -> Tensor:
        """Log marginal likelihood of targets under the GP prior plus noise.

        Defaults to the stored conditioning data. Inputs/targets may be graph
        tensors, in which case gradients flow through them as well as through
        the hyperparameters.
        """
        ti = inputs if inputs is not None else self.train_inputs
        tt = targets if targets is not None else self.train_targets
        if ti is None or tt is None:
            raise ValueError("mll needs at least one training point")
        x = ti if isinstance(ti, Tensor) else Tensor(np.atleast_2d(ti))
        t = tt if isinstance(tt, Tensor) else Tensor(np.asarray(tt, dtype=np.float64).reshape(-1, 1))
        n = x.data.shape[0]
        if n < 1:
            raise ValueError("mll needs at least one training point")
        if t.data.shape != (n, 1):
            raise ValueError("mll targets must be a single column matching the input rows")
        kmat = rbf_kernel(self.hyp, x, x, leaves)
        amat = kmat + self.hyp.noise_var_t(leaves) * Tensor(np.eye(n))
        low = cholesky(amat)
        resid = t - as_tensor(self.hyp.mean_const, leaves)
        u = triangular_solve(low, resid, lower=True)
        quad = tsum(u * u)
        logdet = 2.0 * tsum(log(diag_part(low)))
        return -0.5 * quad - 0.5 * logdet - 0.5 * n * LOG_TWO_PI

    def _factorize(self):
        if self._factor is None:
            amat = rbf_matrix(self.hyp, self.train_inputs)
            amat[np.diag_indices_from(amat)] += self.hyp.noise_var()
            low, _ = linalg.stable_cholesky(amat)
            resid = self.train_targets - self.hyp.mean()
            alpha = linalg.solve_upper(low.T, linalg.solve_lower(low, resid))
            self._factor = (low, alpha)
        return self._factor

    def posterior(self, query: np.ndarray) -> PosteriorGaussian:
        """Exact conditional over latent function values at the query rows.

        With no conditioning data this is the prior: mean c, covariance
        K(Q, Q) without the observation-noise term.
        """
        query = np.atleast_2d(np.asarray(query, dtype=np.float64))
        kqq = rbf_matrix(self.hyp, query)
        if self.n_train == 0:
            mean = np.full(query.shape[0], self.hyp.mean())
            return PosteriorGaussian._owned(mean, kqq)
        low, alpha = self._factorize()
        kxq = rbf_matrix(self.hyp, self.train_inputs, query)
        mean = self.hyp.mean() + kxq.T @ alpha
        v = linalg.solve_lower(low, kxq, overwrite_b=True)
        kqq -= v.T @ v
        # conditioning makes the covariance singular to rounding at the
        # observed points, so sampling starts at the first jitter rung
        return PosteriorGaussian._owned(mean, kqq, singular=True)


class MultiOutputGp:
    """m independent single-output heads over a shared training-input matrix."""

    def __init__(self, input_dim: int, n_heads: int):
        self.heads = [ExactGp(input_dim, index=j) for j in range(n_heads)]

    @property
    def n_heads(self) -> int:
        return len(self.heads)

    def condition(self, inputs: np.ndarray, targets: np.ndarray) -> None:
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
        if targets.shape[1] != len(self.heads):
            raise ValueError("target column count does not match head count")
        for pos, head in enumerate(self.heads):
            head.condition(inputs, targets[:, pos])

    def clear(self) -> None:
        for head in self.heads:
            head.clear()

    def mll(self, inputs=None, targets=None, leaves=None) -> Tensor:
        """Sum of per-head marginal likelihoods.

        Column k of `targets` belongs to heads[k]; terms are added in order
        of the heads' stable indices, so reordering the head list together
        with the target columns cannot change the result.
        """
        total = None
        if targets is None:
            pairs = [(head, None) for head in self.heads]
        else:
            tt = targets if isinstance(targets, Tensor) else Tensor(np.atleast_2d(targets))
            pairs = [(head, column(tt, pos)) for pos, head in enumerate(self.heads)]
        for head, col in sorted(pairs, key=lambda pair: pair[0].index):
            term = head.mll(inputs, col, leaves)
            total = term if total is None else total + term
        return total

    def posterior(self, query: np.ndarray) -> MultiPosterior:
        query = np.atleast_2d(np.asarray(query, dtype=np.float64))
        ordered = sorted(self.heads, key=lambda h: h.index)
        means = np.empty((query.shape[0], len(ordered)))
        covs = []
        singular = False
        for j, head in enumerate(ordered):
            post = head.posterior(query)
            means[:, j] = post.mean
            covs.append(post.cov)
            singular = singular or post._singular
        return MultiPosterior._owned(means, covs, singular=singular)

    def params_groups(self) -> list[tuple[str, ParamSet]]:
        return [(f"head{h.index}", h.hyp.params) for h in self.heads]


def gp_mll(gp: ExactGp, leaves=None) -> Tensor:
    """Marginal log likelihood of the GP's stored training data."""
    return gp.mll(leaves=leaves)


def gp_posterior(gp: ExactGp, query: np.ndarray) -> PosteriorGaussian:
    return gp.posterior(query)


def multioutput_mll(mgp: MultiOutputGp, targets, leaves=None) -> Tensor:
    """Summed marginal log likelihood across heads for an (n, m) target matrix."""
    return mgp.mll(targets=targets, leaves=leaves)


def posterior_joint_sample(post, rng: CounterRng) -> np.ndarray:
    """One joint draw: mean + L eps with L the jittered Cholesky factor.

    Vector for a single-output posterior, (q, m) matrix with one column per
    head for a multi-output posterior. Deterministic given the rng state.
    """
    return post.sample(rng)
