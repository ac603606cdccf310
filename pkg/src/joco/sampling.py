"""Quasi-random initialization draws."""

import warnings

import numpy as np
from scipy.stats import qmc


def sobol_unit(dim: int, n: int, scramble_seed: int) -> np.ndarray:
    """n scrambled Sobol points in the unit cube; shape (n, dim).

    scipy warns when n is not a power of two; initialization sizes are a
    fixed fraction of the budget, so the warning is expected and muted.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        engine = qmc.Sobol(d=dim, scramble=True, seed=int(scramble_seed) & (2**63 - 1))
        return engine.random(n)
