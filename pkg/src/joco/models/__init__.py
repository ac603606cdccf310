from .encoders import MlpEncoder, mlp_forward
from .gp import (
    ExactGp,
    GpHyperparams,
    MultiOutputGp,
    MultiPosterior,
    PosteriorGaussian,
    gp_mll,
    gp_posterior,
    multioutput_mll,
    posterior_joint_sample,
    rbf_kernel,
)

__all__ = [
    "ExactGp",
    "GpHyperparams",
    "MlpEncoder",
    "MultiOutputGp",
    "MultiPosterior",
    "PosteriorGaussian",
    "gp_mll",
    "gp_posterior",
    "mlp_forward",
    "multioutput_mll",
    "posterior_joint_sample",
    "rbf_kernel",
]
