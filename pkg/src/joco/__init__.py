"""Joint composite latent-space Bayesian optimization toolkit.

Library layout:

- ``joco.numgrad``     float64 tensors + reverse-mode gradients
- ``joco.models``      MLP encoders and exact GP regressors
- ``joco.core``        the joint method: loss, training, Thompson sampling, loop
- ``joco.trustregion`` adaptive search-box state machine
- ``joco.problems``    composite benchmark problems
- ``joco.baselines``   random search / vanilla BO / trust-region BO
- ``joco.harness``     CLI, replicate runner, CSV/SVG outputs
"""

from .baselines import MethodSpec, run_random, run_turbo, run_vanilla_bo
from .core import (
    AblationFlags,
    EvalRecord,
    History,
    JocoModels,
    RunAborted,
    TrainConfig,
    TrainingDivergedError,
    build_models,
    fit_initial,
    joco_loss,
    mc_ei_select,
    run_joco,
    thompson_sample,
    update_step,
)
from .problems import get_problem, problem_names
from .rng import CounterRng, RunRng

__version__ = "0.1.0"

__all__ = [
    "AblationFlags",
    "CounterRng",
    "EvalRecord",
    "History",
    "JocoModels",
    "MethodSpec",
    "RunAborted",
    "RunRng",
    "TrainConfig",
    "TrainingDivergedError",
    "build_models",
    "fit_initial",
    "get_problem",
    "joco_loss",
    "mc_ei_select",
    "problem_names",
    "run_joco",
    "run_random",
    "run_turbo",
    "run_vanilla_bo",
    "thompson_sample",
    "update_step",
]
