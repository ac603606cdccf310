"""Gradient engine: every primitive against central finite differences,
plus the factorization contracts."""

import math

import numpy as np
import pytest

from joco import numgrad as ng
from joco.numgrad import NotPositiveDefiniteError, NumericalOverflowError

FD_STEP = 1e-5
REL_TOL = 1e-4
ABS_TOL = 1e-7


def fd_gradients(fn, params: ng.ParamSet) -> dict[str, np.ndarray]:
    """Central finite differences of a scalar loss, coordinate by coordinate."""
    out = {}
    for name, p in params.items():
        g = np.zeros_like(p.value)
        flat_v = p.value.reshape(-1)
        flat_g = g.reshape(-1)
        for i in range(flat_v.size):
            orig = flat_v[i]
            flat_v[i] = orig + FD_STEP
            hi = float(fn())
            flat_v[i] = orig - FD_STEP
            lo = float(fn())
            flat_v[i] = orig
            flat_g[i] = (hi - lo) / (2.0 * FD_STEP)
        out[name] = g
    return out


def assert_grads_close(got: dict, want: dict):
    for name in want:
        a, b = got[name], want[name]
        err = np.abs(a - b)
        ok = (err <= ABS_TOL) | (err <= REL_TOL * np.abs(b))
        assert ok.all(), f"{name}: max rel err {np.max(err / (np.abs(b) + 1e-300)):.3g}"


def test_square_scalar():
    ps = ng.ParamSet()
    p = ps.add("p", 3.0)
    val, grads = ng.value_and_grad(lambda lv: ng.mul(lv[p], lv[p]), ps)
    assert val == 9.0
    assert grads["p"] == 6.0


def test_sum_of_identity_matvec():
    ps = ng.ParamSet()
    v = ps.add("v", [[1.0], [2.0]])
    eye = ng.constant(np.eye(2))
    val, grads = ng.value_and_grad(lambda lv: ng.tsum(ng.matmul(eye, lv[v])), ps)
    assert val == 3.0
    assert np.array_equal(grads["v"], np.ones((2, 1)))


def test_unused_parameter_gets_zero_gradient():
    ps = ng.ParamSet()
    a = ps.add("a", 2.0)
    ps.add("unused", np.ones(3))
    _, grads = ng.value_and_grad(lambda lv: ng.mul(lv[a], lv[a]), ps)
    assert np.array_equal(grads["unused"], np.zeros(3))


def _random_graph_loss(rng: np.random.Generator):
    """A random composition of all supported primitives with FD-safe values.

    Leaf magnitudes stay away from relu's kink and log stays fed by
    positive expressions, so central differences at step 1e-5 are valid.
    """
    n, m, k = (int(rng.integers(2, 5)) for _ in range(3))
    ps = ng.ParamSet()
    a = ps.add("a", rng.uniform(0.2, 1.5, size=(n, m)) * rng.choice([-1.0, 1.0], size=(n, m)))
    b = ps.add("b", rng.uniform(0.2, 1.5, size=(m, k)))
    c = ps.add("c", rng.uniform(0.3, 1.0, size=(1, k)))
    s = ps.add("s", rng.uniform(0.5, 1.5))
    w = ps.add("w", rng.uniform(0.3, 1.2, size=(n, n)))
    rhs = ng.constant(rng.uniform(-1.0, 1.0, size=(n, k)))

    def loss(lv):
        t = ng.matmul(lv[a], lv[b])          # (n, k)
        t = ng.tanh(t + lv[c])               # broadcast add over rows
        t = t * ng.exp(lv[s])                # scalar broadcast multiply
        t = ng.relu(t + 0.75)                # inputs kept away from the kink
        gram = ng.matmul(lv[w], ng.transpose(lv[w])) + ng.constant(np.eye(n) * (n + 1.0))
        low = ng.cholesky(gram)
        u = ng.triangular_solve(low, t + rhs, lower=True)
        v = ng.triangular_solve(ng.transpose(low), u, lower=False)
        logdet = ng.tsum(ng.log(ng.diag_part(low)))
        col = ng.column(v, 0)
        return ng.tsum(v * v) + logdet + ng.tsum(ng.tsum(col, axis=0)) - 0.5 * ng.tsum(t)

    return ps, loss


@pytest.mark.parametrize("seed", range(110))
def test_random_graph_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    ps, loss = _random_graph_loss(rng)
    _, grads = ng.value_and_grad(loss, ps)
    got = {name: g.copy() for name, g in grads.items()}
    want = fd_gradients(lambda: ng.value_and_grad(loss, ps)[0], ps)
    assert_grads_close(got, want)


def test_operations_are_deterministic():
    rng = np.random.default_rng(5)
    ps, loss = _random_graph_loss(rng)
    v1, g1 = ng.value_and_grad(loss, ps)
    g1 = {k: v.copy() for k, v in g1.items()}
    v2, g2 = ng.value_and_grad(loss, ps)
    assert v1 == v2
    for k in g1:
        assert np.array_equal(g1[k], g2[k])


class TestCholesky:
    def test_identity_has_zero_jitter(self):
        low, jitter = ng.stable_cholesky(np.eye(3))
        assert np.array_equal(low, np.eye(3))
        assert jitter == 0.0

    def test_hand_two_by_two(self):
        low, jitter = ng.stable_cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
        assert jitter == 0.0
        want = np.array([[2.0, 0.0], [1.0, math.sqrt(2.0)]])
        assert np.allclose(low, want, atol=1e-15)
        assert np.allclose(low @ low.T, [[4, 2], [2, 3]], atol=1e-15)

    def test_rank_deficient_needs_jitter(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        low, jitter = ng.stable_cholesky(a)
        assert jitter >= 1e-6
        recon = low @ low.T - (a + jitter * np.eye(2))
        assert np.max(np.abs(recon)) <= 1e-8 * (1 + np.max(np.abs(a)))

    def test_reconstruction_tolerance_on_random_factors(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            low = np.tril(rng.standard_normal((n, n)))
            low[np.diag_indices(n)] = np.abs(low[np.diag_indices(n)]) + 0.5
            a = low @ low.T
            low2, jitter = ng.stable_cholesky(a)
            err = np.max(np.abs(low2 @ low2.T - (a + jitter * np.eye(n))))
            assert err <= 1e-8 * (1.0 + np.max(np.abs(a)))

    def test_negative_definite_raises(self):
        with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
            ng.stable_cholesky(-np.eye(2))

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            ng.stable_cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_zero_matrix_factors_to_zero(self):
        low, jitter = ng.stable_cholesky(np.zeros((3, 3)))
        assert np.array_equal(low, np.zeros((3, 3)))
        assert jitter == 0.0

    def test_graph_op_records_jitter(self):
        out = ng.cholesky(ng.constant([[1.0, 1.0], [1.0, 1.0]]))
        assert out.info["jitter"] >= 1e-6


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_overflow_raises_named_error():
    big = ng.constant(700.0)
    with pytest.raises(NumericalOverflowError, match="numerical overflow in graph"):
        ng.exp(ng.mul(big, big))


def test_matmul_shape_validation():
    with pytest.raises(ValueError):
        ng.matmul(ng.constant(np.ones(3)), ng.constant(np.ones((3, 2))))


def test_gp_marginal_likelihood_gradient_matches_fd():
    # 4-point dataset; loss is the full Gaussian log density via Cholesky
    rng = np.random.default_rng(12)
    z = rng.standard_normal((4, 2))
    t = rng.standard_normal((4, 1))
    ps = ng.ParamSet()
    log_ls = ps.add("log_ls", rng.standard_normal(2) * 0.2)
    log_sf = ps.add("log_sf", 0.1)
    log_sn = ps.add("log_sn", math.log(0.05))
    mean_c = ps.add("mean_c", 0.3)

    def loss(lv):
        inv_ls = ng.exp(-lv[log_ls])
        sa = ng.constant(z) * inv_ls
        a2 = ng.tsum(sa * sa, axis=1, keepdims=True)
        d2 = a2 + ng.transpose(a2) - 2.0 * ng.matmul(sa, ng.transpose(sa))
        kmat = ng.exp(lv[log_sf]) * ng.exp(-0.5 * d2)
        amat = kmat + ng.exp(lv[log_sn]) * ng.constant(np.eye(4))
        low = ng.cholesky(amat)
        resid = ng.constant(t) - lv[mean_c]
        u = ng.triangular_solve(low, resid, lower=True)
        return -0.5 * ng.tsum(u * u) - ng.tsum(ng.log(ng.diag_part(low))) - 2.0 * math.log(2 * math.pi)

    _, grads = ng.value_and_grad(loss, ps)
    got = {k: v.copy() for k, v in grads.items()}
    want = fd_gradients(lambda: ng.value_and_grad(loss, ps)[0], ps)
    assert_grads_close(got, want)
