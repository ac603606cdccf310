"""Joint composite latent-space Bayesian optimization.

Four trainable components work together: an input encoder, an outcome
encoder, a multi-output GP from the input latent space to the outcome
latent space, and a single-output GP from the outcome latent space to the
reward. All four are trained jointly on one loss (the negated average of
the two GP marginal likelihoods, which share the encoded outcomes), and
candidates are picked by two-stage Thompson sampling inside a trust
region.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import trustregion as tr
from .adam import Adam
from .models import ExactGp, MlpEncoder, MultiOutputGp
from .numgrad import ParamSet, Tensor, value_and_grad
from .rng import CounterRng, RunRng
from .sampling import sobol_unit


class TrainingDivergedError(RuntimeError):
    def __init__(self):
        super().__init__("training diverged")


class RunAborted(RuntimeError):
    """An optimization run died mid-way; carries the partial history."""

    def __init__(self, history: "History", cause: BaseException):
        super().__init__(f"run aborted after {len(history.records)} evaluations: {cause}")
        self.history = history
        self.cause = cause


@dataclass
class EvalRecord:
    """One observation triple: input, intermediate outputs, reward."""

    x: np.ndarray
    y: np.ndarray
    f: float


@dataclass
class History:
    """Evaluations in order plus the running best and per-eval wall time."""

    records: list[EvalRecord] = field(default_factory=list)
    best_f: list[float] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)

    def append(self, record: EvalRecord, wall_ms: float) -> None:
        prev = self.best_f[-1] if self.best_f else -math.inf
        self.records.append(record)
        self.best_f.append(max(prev, record.f))
        self.wall_ms.append(wall_ms)

    def __len__(self) -> int:
        return len(self.records)

    def best_record(self) -> EvalRecord:
        k = int(np.argmax([r.f for r in self.records]))
        return self.records[k]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    n_b: int = 20
    epochs_init: int = 30
    epochs_update: int = 1
    init_fraction: float = 0.10

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0.0 < self.init_fraction < 1.0):
            raise ValueError("init_fraction must be in (0, 1)")
        if self.n_b < 1 or self.epochs_init < 0 or self.epochs_update < 0:
            raise ValueError("counts must be non-negative (n_b positive)")


@dataclass(frozen=True)
class AblationFlags:
    joint_training: bool = True
    update_models: bool = True
    use_trust_region: bool = True
    outcome_uncertainty: bool = True
    reward_uncertainty: bool = True
    acquisition: str = "thompson"  # "thompson" | "mc_ei"

    def __post_init__(self):
        if self.acquisition not in ("thompson", "mc_ei"):
            raise ValueError("acquisition must be 'thompson' or 'mc_ei'")


# outcome-encoder widths per benchmark; [m, hidden..., latent]
OUTCOME_ENCODER_WIDTHS = {
    "rosenbrock": [18, 18, 8],
    "langermann": [60, 32, 8],
    "environmental": [16, 16, 8],
    "rover": [1000, 256, 128, 32],
}

MAX_INPUT_LATENT = 16
_STD_FLOOR = 1e-8


def input_encoder_widths(d: int, d_latent: int | None = None) -> list[int]:
    d_latent = min(MAX_INPUT_LATENT, d) if d_latent is None else d_latent
    return [d, max(1, d // 2), d_latent]


def outcome_encoder_widths(name: str, m: int) -> list[int]:
    if name in OUTCOME_ENCODER_WIDTHS:
        return list(OUTCOME_ENCODER_WIDTHS[name])
    latent = min(8, m)
    return [m, max(latent, min(32, m)), latent]


class JocoModels:
    """The four trainable components plus normalization state.

    Inputs are mapped to the unit cube before encoding; intermediate
    outputs and rewards are standardized by the mean/std of everything
    observed so far (constants refreshed at each fit/update).
    """

    def __init__(
        self,
        lower: np.ndarray,
        upper: np.ndarray,
        e_x: MlpEncoder,
        e_y: MlpEncoder,
    ):
        if e_x.out_dim < 1 or e_y.out_dim < 1:
            raise ValueError("latent widths must be positive")
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        self.e_x = e_x
        self.e_y = e_y
        self.h_hat = MultiOutputGp(e_x.out_dim, e_y.out_dim)
        self.g_hat = ExactGp(e_y.out_dim)
        self.f_mean = 0.0
        self.f_std = 1.0
        self.y_mean = np.zeros(e_y.in_dim)
        self.y_std = np.ones(e_y.in_dim)
        # latent standardization: shift/scale chosen so each latent dimension
        # has std 1/sqrt(dim), making unit lengthscales discriminative from
        # the start (typical pairwise squared distance ~ 2)
        self.zx_shift = np.zeros(e_x.out_dim)
        self.zx_scale = np.full(e_x.out_dim, 1.0 / math.sqrt(e_x.out_dim))
        self.zy_shift = np.zeros(e_y.out_dim)
        self.zy_scale = np.full(e_y.out_dim, 1.0 / math.sqrt(e_y.out_dim))

    # ---- parameter views -------------------------------------------------
    def params_outcome_branch(self) -> ParamSet:
        groups = [("e_x", self.e_x.params)]
        groups += [(f"h.{name}", ps) for name, ps in self.h_hat.params_groups()]
        return ParamSet.merged(groups)

    def params_reward_branch(self) -> ParamSet:
        return ParamSet.merged([("e_y", self.e_y.params), ("g", self.g_hat.hyp.params)])

    def params_all(self) -> ParamSet:
        groups = [("e_x", self.e_x.params), ("e_y", self.e_y.params)]
        groups += [(f"h.{name}", ps) for name, ps in self.h_hat.params_groups()]
        groups += [("g", self.g_hat.hyp.params)]
        return ParamSet.merged(groups)

    # ---- normalization ---------------------------------------------------
    def unit_x(self, x: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(x) - self.lower) / (self.upper - self.lower)

    def norm_y(self, y: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(y) - self.y_mean) / self.y_std

    def std_f(self, f: np.ndarray) -> np.ndarray:
        return (np.asarray(f, dtype=np.float64) - self.f_mean) / self.f_std

    def update_standardization(self, records: list[EvalRecord]) -> None:
        """Refresh all normalization constants from the observed data.

        Covers the reward, the raw intermediate outputs (encoder inputs),
        and the current encoder outputs; called before every fit/update so
        the GPs always see well-scaled spaces regardless of encoder drift.
        """
        xs = np.stack([r.x for r in records])
        ys = np.stack([r.y for r in records])
        fs = np.array([r.f for r in records])
        self.y_mean = ys.mean(axis=0)
        self.y_std = np.maximum(ys.std(axis=0), _STD_FLOOR)
        self.f_mean = float(fs.mean())
        self.f_std = max(float(fs.std()), _STD_FLOOR)
        zx = self.e_x.forward(self.unit_x(xs)).data
        zy = self.e_y.forward(self.norm_y(ys)).data
        self.zx_shift = zx.mean(axis=0)
        self.zx_scale = 1.0 / (np.maximum(zx.std(axis=0), _STD_FLOOR) * math.sqrt(zx.shape[1]))
        self.zy_shift = zy.mean(axis=0)
        self.zy_scale = 1.0 / (np.maximum(zy.std(axis=0), _STD_FLOOR) * math.sqrt(zy.shape[1]))

    # ---- encoding --------------------------------------------------------
    def encode_x(self, x: np.ndarray, leaves=None) -> Tensor:
        t = self.e_x.forward(self.unit_x(x), leaves)
        return (t - Tensor(self.zx_shift)) * Tensor(self.zx_scale)

    def encode_y(self, y: np.ndarray, leaves=None) -> Tensor:
        t = self.e_y.forward(self.norm_y(y), leaves)
        return (t - Tensor(self.zy_shift)) * Tensor(self.zy_scale)


def build_models(
    problem,
    rng: CounterRng | None,
    d_latent: int | None = None,
    ey_widths: list[int] | None = None,
) -> JocoModels:
    """Models sized for a problem; encoder weights drawn from `rng`
    (input encoder first, then outcome encoder)."""
    e_x = MlpEncoder(input_encoder_widths(problem.d, d_latent), rng)
    e_y = MlpEncoder(ey_widths or outcome_encoder_widths(problem.name, problem.m), rng)
    return JocoModels(problem.lower, problem.upper, e_x, e_y)


# ---- joint loss -----------------------------------------------------------


def _stack_batch(batch: list[EvalRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = np.stack([r.x for r in batch])
    ys = np.stack([r.y for r in batch])
    fs = np.array([r.f for r in batch])
    return xs, ys, fs


def joco_loss_terms(models: JocoModels, batch: list[EvalRecord], leaves=None) -> tuple[Tensor, Tensor]:
    """The two averaged negative-likelihood terms of the joint loss.

    The encoded outcomes are computed once and feed both the multi-output
    GP (as targets) and the reward GP (as inputs), so gradients with
    respect to the outcome encoder flow through both terms.
    """
    if not batch:
        raise ValueError("loss needs a non-empty batch")
    xs, ys, fs = _stack_batch(batch)
    n = len(batch)
    zx = models.encode_x(xs, leaves)
    zy = models.encode_y(ys, leaves)
    f_std = Tensor(models.std_f(fs).reshape(-1, 1))
    term_outcome = (-1.0 / n) * models.h_hat.mll(inputs=zx, targets=zy, leaves=leaves)
    term_reward = (-1.0 / n) * models.g_hat.mll(inputs=zy, targets=f_std, leaves=leaves)
    return term_outcome, term_reward


def joco_loss(models: JocoModels, batch: list[EvalRecord], leaves=None) -> Tensor:
    """Scalar training loss to minimize (negated average joint likelihood)."""
    term_outcome, term_reward = joco_loss_terms(models, batch, leaves)
    return term_outcome + term_reward


# ---- training -------------------------------------------------------------


def _adam_steps(models: JocoModels, params: ParamSet, loss_fn, steps: int, lr: float) -> None:
    opt = Adam(params, lr=lr)
    for _ in range(steps):
        val, _ = value_and_grad(loss_fn, params)
        if not math.isfinite(val):
            raise TrainingDivergedError()
        opt.step()


def fit_initial(
    models: JocoModels,
    data: list[EvalRecord],
    cfg: TrainConfig,
    rng: CounterRng | None = None,
) -> JocoModels:
    """Joint full-batch fit on the initialization data.

    `rng` is accepted for interface symmetry; full-batch training is
    deterministic and does not consume it.
    """
    if len(data) < 2:
        raise ValueError("initial fit needs at least 2 data points")
    models.update_standardization(data)
    if cfg.epochs_init > 0:
        _adam_steps(
            models,
            models.params_all(),
            lambda lv: joco_loss(models, data, lv),
            cfg.epochs_init,
            cfg.learning_rate,
        )
    refresh_conditioning(models, data)
    return models


def update_step(
    models: JocoModels,
    history: list[EvalRecord],
    cfg: TrainConfig,
    flags: AblationFlags,
) -> JocoModels:
    """Per-iteration refit on the most recent n_b records.

    A fresh optimizer is used every call. With joint training disabled the
    input branch (input encoder + outcome GP) trains on the first loss term
    first, then the reward branch (outcome encoder + reward GP) on the
    second. Disabled updates (or zero epochs) make this a no-op.
    """
    if not history:
        raise ValueError("update needs a non-empty history")
    if not flags.update_models or cfg.epochs_update == 0:
        return models
    batch = history[-min(cfg.n_b, len(history)) :]
    models.update_standardization(history)
    if flags.joint_training:
        _adam_steps(
            models,
            models.params_all(),
            lambda lv: joco_loss(models, batch, lv),
            cfg.epochs_update,
            cfg.learning_rate,
        )
    else:
        _adam_steps(
            models,
            models.params_outcome_branch(),
            lambda lv: joco_loss_terms(models, batch, lv)[0],
            cfg.epochs_update,
            cfg.learning_rate,
        )
        _adam_steps(
            models,
            models.params_reward_branch(),
            lambda lv: joco_loss_terms(models, batch, lv)[1],
            cfg.epochs_update,
            cfg.learning_rate,
        )
    return models


def refresh_conditioning(models: JocoModels, history: list[EvalRecord]) -> None:
    """Condition both GPs on the full encoded history.

    Runs regardless of the update flags: the conditioning set is data, not
    trainable state, so frozen-model ablations still observe everything.
    """
    xs, ys, fs = _stack_batch(history)
    zx = models.encode_x(xs).data
    zy = models.encode_y(ys).data
    models.h_hat.condition(zx, zy)
    models.g_hat.condition(zy, models.std_f(fs))


# ---- acquisition ----------------------------------------------------------


def _draw_candidates(bounds, n_sample: int, rng: CounterRng) -> np.ndarray:
    lower, upper = bounds
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if n_sample < 1:
        raise ValueError("n_sample must be at least 1")
    if np.any(upper <= lower):
        raise ValueError("degenerate candidate bounds")
    return rng.uniform_box(lower, upper, n_sample)


def thompson_sample(
    models: JocoModels,
    bounds: tuple[np.ndarray, np.ndarray],
    n_sample: int,
    flags: AblationFlags,
    rng: CounterRng,
) -> np.ndarray:
    """Two-stage Thompson sampling over uniform candidates in `bounds`.

    Stage one draws a joint sample of latent outcomes at the encoded
    candidates (or takes the posterior mean when outcome uncertainty is
    ablated); stage two draws rewards at those outcomes (or their mean).
    Returns the candidate with the largest reward draw, ties to the lowest
    index.
    """
    cands = _draw_candidates(bounds, n_sample, rng)
    zx = models.encode_x(cands).data
    post_h = models.h_hat.posterior(zx)
    latent = post_h.sample(rng) if flags.outcome_uncertainty else post_h.mean
    post_g = models.g_hat.posterior(latent).affine(models.f_std, models.f_mean)
    rewards = post_g.sample(rng) if flags.reward_uncertainty else post_g.mean
    return cands[int(np.argmax(rewards))].copy()


def mc_ei_select(
    models: JocoModels,
    bounds: tuple[np.ndarray, np.ndarray],
    n_sample: int,
    f_best: float,
    k_mc: int,
    rng: CounterRng,
) -> np.ndarray:
    """Monte-Carlo expected improvement over the same candidate scheme.

    Each candidate is scored by the average positive part of k_mc
    end-to-end posterior reward draws minus the incumbent.
    """
    if k_mc < 1:
        raise ValueError("k_mc must be at least 1")
    cands = _draw_candidates(bounds, n_sample, rng)
    zx = models.encode_x(cands).data
    post_h = models.h_hat.posterior(zx)
    total = np.zeros(cands.shape[0])
    for _ in range(k_mc):
        latent = post_h.sample(rng)
        post_g = models.g_hat.posterior(latent).affine(models.f_std, models.f_mean)
        total += np.maximum(post_g.sample(rng) - f_best, 0.0)
    return cands[int(np.argmax(total / k_mc))].copy()


# ---- the optimization loop -------------------------------------------------


def init_count(budget: int, cfg: TrainConfig) -> int:
    return int(round(cfg.init_fraction * budget))


def run_joco(
    problem,
    budget: int,
    cfg: TrainConfig,
    flags: AblationFlags,
    rng: RunRng,
    n_sample: int = 1024,
    k_mc: int = 32,
) -> History:
    """The full optimization loop; returns the evaluation history.

    Scrambled-Sobol initialization, joint initial fit, then repeat: pick a
    candidate inside the trust region (or the whole domain), evaluate,
    update the trust region and the models. Any error aborts with the
    partial history attached to the raised RunAborted.
    """
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

        models = build_models(problem, rng.stream("model-init"))
        fit_initial(models, history.records, cfg)

        tr_cfg = tr.default_config(problem.d)
        state = None
        if flags.use_trust_region:
            state = tr.initial_state(problem.to_unit(history.best_record().x), tr_cfg)

        acquire = rng.stream("acquire")
        while len(history) < budget:
            if state is not None:
                lo_u, hi_u = tr.tr_bounds(state, tr_cfg)
            else:
                lo_u, hi_u = np.zeros(problem.d), np.ones(problem.d)
            bounds = (problem.from_unit(lo_u), problem.from_unit(hi_u))
            f_best_prev = history.best_f[-1]
            if flags.acquisition == "thompson":
                x_next = thompson_sample(models, bounds, n_sample, flags, acquire)
            else:
                x_next = mc_ei_select(models, bounds, n_sample, f_best_prev, k_mc, acquire)
            rec = evaluate(x_next)
            if state is not None:
                state = tr.tr_update(state, rec.f, f_best_prev, problem.to_unit(rec.x), tr_cfg)
            update_step(models, history.records, cfg, flags)
            refresh_conditioning(models, history.records)
    except Exception as err:  # noqa: BLE001 - partial history must survive
        raise RunAborted(history, err) from err
    return history
