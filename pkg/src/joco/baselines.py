"""Comparison methods: random search and deep-kernel BO with/without a trust region.

The BO baselines model the reward directly from the input (no composite
structure): the same input-encoder architecture feeds a single exact GP,
trained on the same schedule as the composite method, and candidates are
picked by Thompson sampling. They share the quasi-random initialization
with the composite method for any given seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import trustregion as tr
from .adam import Adam
from .core import (
    AblationFlags,
    EvalRecord,
    History,
    RunAborted,
    TrainConfig,
    TrainingDivergedError,
    init_count,
    input_encoder_widths,
)
from .models import ExactGp, MlpEncoder
from .numgrad import ParamSet, Tensor, value_and_grad
from .rng import CounterRng, RunRng
from .sampling import sobol_unit

METHOD_NAMES = ("joco", "random", "vanilla_bo", "turbo")


@dataclass(frozen=True)
class MethodSpec:
    """A method selection; ablation flags only apply to the composite method."""

    name: str
    flags: AblationFlags = field(default_factory=AblationFlags)

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise ValueError(f"unknown method: {self.name!r} (choose from {METHOD_NAMES})")


def run_random(problem, budget: int, rng: RunRng) -> History:
    """Uniform search over the domain."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    history = History()
    stream = rng.stream("random-search")
    try:
        for x in stream.uniform_box(problem.lower, problem.upper, budget):
            t0 = time.perf_counter()
            y, f = problem.evaluate(x)
            history.append(EvalRecord(x=x, y=y, f=f), (time.perf_counter() - t0) * 1000.0)
    except Exception as err:  # noqa: BLE001
        raise RunAborted(history, err) from err
    return history


class _DeepKernelGp:
    """Input encoder feeding one exact GP on standardized rewards.

    Encoder outputs are standardized to per-dimension std 1/sqrt(dim) with
    constants refreshed at every update, matching the composite method's
    latent handling.
    """

    def __init__(self, problem, rng: CounterRng):
        self.lower = problem.lower
        self.upper = problem.upper
        self.encoder = MlpEncoder(input_encoder_widths(problem.d), rng)
        self.gp = ExactGp(self.encoder.out_dim)
        self.f_mean = 0.0
        self.f_std = 1.0
        self.zx_shift = np.zeros(self.encoder.out_dim)
        self.zx_scale = np.full(self.encoder.out_dim, 1.0 / math.sqrt(self.encoder.out_dim))

    def params(self) -> ParamSet:
        return ParamSet.merged([("e_x", self.encoder.params), ("gp", self.gp.hyp.params)])

    def unit_x(self, x: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(x) - self.lower) / (self.upper - self.lower)

    def encode(self, x: np.ndarray, leaves=None) -> Tensor:
        t = self.encoder.forward(self.unit_x(x), leaves)
        return (t - Tensor(self.zx_shift)) * Tensor(self.zx_scale)

    def update_standardization(self, records: list[EvalRecord]) -> None:
        fs = np.array([r.f for r in records])
        self.f_mean = float(fs.mean())
        self.f_std = max(float(fs.std()), 1e-8)
        xs = np.stack([r.x for r in records])
        zx = self.encoder.forward(self.unit_x(xs)).data
        self.zx_shift = zx.mean(axis=0)
        self.zx_scale = 1.0 / (
            np.maximum(zx.std(axis=0), 1e-8) * math.sqrt(zx.shape[1])
        )

    def loss(self, batch: list[EvalRecord], leaves=None) -> Tensor:
        xs = np.stack([r.x for r in batch])
        fs = (np.array([r.f for r in batch]) - self.f_mean) / self.f_std
        zx = self.encode(xs, leaves)
        return (-1.0 / len(batch)) * self.gp.mll(inputs=zx, targets=Tensor(fs.reshape(-1, 1)), leaves=leaves)

    def train(self, batch: list[EvalRecord], steps: int, lr: float) -> None:
        params = self.params()
        opt = Adam(params, lr=lr)
        for _ in range(steps):
            val, _ = value_and_grad(lambda lv: self.loss(batch, lv), params)
            if not math.isfinite(val):
                raise TrainingDivergedError()
            opt.step()

    def condition(self, records: list[EvalRecord]) -> None:
        xs = np.stack([r.x for r in records])
        fs = (np.array([r.f for r in records]) - self.f_mean) / self.f_std
        self.gp.condition(self.encode(xs).data, fs)

    def thompson_pick(self, bounds, n_sample: int, rng: CounterRng) -> np.ndarray:
        lower, upper = bounds
        cands = rng.uniform_box(np.asarray(lower), np.asarray(upper), n_sample)
        post = self.gp.posterior(self.encode(cands).data).affine(self.f_std, self.f_mean)
        return cands[int(np.argmax(post.sample(rng)))].copy()


def _run_deep_kernel_bo(
    problem,
    budget: int,
    cfg: TrainConfig,
    rng: RunRng,
    use_trust_region: bool,
    n_sample: int,
) -> History:
    n_init = init_count(budget, cfg)
    if budget < math.ceil(cfg.init_fraction * budget) + 1:
        raise ValueError("budget leaves no room for model-guided evaluations")
    if n_init < 2:
        raise ValueError("initialization would have fewer than 2 points")

    history = History()

    def evaluate(x: np.ndarray) -> EvalRecord:
        t0 = time.perf_counter()
        y, f = problem.evaluate(x)
        rec = EvalRecord(x=np.asarray(x, dtype=np.float64), y=y, f=f)
        history.append(rec, (time.perf_counter() - t0) * 1000.0)
        return rec

    try:
        for u in sobol_unit(problem.d, n_init, rng.stream("sobol").next_uint64()):
            evaluate(problem.from_unit(u))

        model = _DeepKernelGp(problem, rng.stream("model-init"))
        model.update_standardization(history.records)
        if cfg.epochs_init > 0:
            model.train(history.records, cfg.epochs_init, cfg.learning_rate)
        model.condition(history.records)

        tr_cfg = tr.default_config(problem.d)
        state = None
        if use_trust_region:
            state = tr.initial_state(problem.to_unit(history.best_record().x), tr_cfg)

        acquire = rng.stream("acquire")
        while len(history) < budget:
            if state is not None:
                lo_u, hi_u = tr.tr_bounds(state, tr_cfg)
                bounds = (problem.from_unit(lo_u), problem.from_unit(hi_u))
            else:
                bounds = (problem.lower, problem.upper)
            f_best_prev = history.best_f[-1]
            x_next = model.thompson_pick(bounds, n_sample, acquire)
            rec = evaluate(x_next)
            if state is not None:
                state = tr.tr_update(state, rec.f, f_best_prev, problem.to_unit(rec.x), tr_cfg)
            if cfg.epochs_update > 0:
                batch = history.records[-min(cfg.n_b, len(history.records)) :]
                model.update_standardization(history.records)
                model.train(batch, cfg.epochs_update, cfg.learning_rate)
            model.condition(history.records)
    except Exception as err:  # noqa: BLE001
        raise RunAborted(history, err) from err
    return history


def run_vanilla_bo(problem, budget: int, cfg: TrainConfig, rng: RunRng, n_sample: int = 4096) -> History:
    """Deep-kernel BO with Thompson sampling over the full domain."""
    return _run_deep_kernel_bo(problem, budget, cfg, rng, use_trust_region=False, n_sample=n_sample)


def run_turbo(problem, budget: int, cfg: TrainConfig, rng: RunRng, n_sample: int = 4096) -> History:
    """Deep-kernel BO with candidates drawn from the adaptive trust region."""
    return _run_deep_kernel_bo(problem, budget, cfg, rng, use_trust_region=True, n_sample=n_sample)
