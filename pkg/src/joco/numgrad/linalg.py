"""Stable Cholesky factorization with an escalating jitter ladder."""

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefiniteError

# Jitter ladder relative to mean(diag(A)): 1e-6, 1e-5, ..., 1e-2.
_JITTER_START = 1e-6
_JITTER_STOP = 1e-2
_JITTER_FACTOR = 10.0

_SYM_TOL = 1e-8


def stable_cholesky(
    a: np.ndarray,
    check_symmetric: bool = True,
    assume_singular: bool = False,
) -> tuple[np.ndarray, float]:
    """Lower-triangular L with L @ L.T == a + jitter * I.

    Tries a plain factorization first; on failure adds diagonal jitter
    starting at 1e-6 * mean(diag(a)) and escalating by x10 up to
    1e-2 * mean(diag(a)). Internal callers that construct symmetric
    matrices by design may skip the symmetry validation, and callers that
    know the matrix is singular to rounding (conditioned-GP covariances at
    observed points) may start directly at the first jitter rung instead of
    wasting a doomed plain attempt.

    Returns (L, jitter). Raises NotPositiveDefiniteError once the ladder
    is exhausted, and ValueError for non-square or non-symmetric input.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"cholesky expects a square matrix, got shape {a.shape}")
    if check_symmetric and a.size:
        scale = max(1.0, float(np.max(np.abs(a))))
        if float(np.max(np.abs(a - a.T))) > _SYM_TOL * scale:
            raise ValueError("cholesky expects a symmetric matrix")
    if a.size == 0:
        return np.zeros_like(a), 0.0
    if not np.any(a):
        # The zero matrix is PSD with factor L = 0; LAPACK would reject it.
        return np.zeros_like(a), 0.0

    mean_diag = float(np.mean(np.diag(a)))
    jitter = _JITTER_START * mean_diag if (assume_singular and mean_diag > 0.0) else 0.0
    diag = np.diag_indices(a.shape[0])
    while True:
        if jitter:
            scratch = a.copy()
            scratch[diag] += jitter
        else:
            scratch = a
        try:
            val = scipy.linalg.cholesky(scratch, lower=True, check_finite=False)
            return val, jitter
        except scipy.linalg.LinAlgError:
            pass
        if mean_diag <= 0.0:
            # trace <= 0 cannot belong to a PD matrix; jitter will not help
            raise NotPositiveDefiniteError()
        if jitter == 0.0:
            jitter = _JITTER_START * mean_diag
        elif jitter < _JITTER_STOP * mean_diag * (1.0 - 1e-12):
            jitter = min(jitter * _JITTER_FACTOR, _JITTER_STOP * mean_diag)
        else:
            raise NotPositiveDefiniteError()


def solve_lower(l: np.ndarray, b: np.ndarray, overwrite_b: bool = False) -> np.ndarray:
    """Solve L x = b for lower-triangular L without finiteness checks."""
    return scipy.linalg.solve_triangular(
        l, b, lower=True, check_finite=False, overwrite_b=overwrite_b
    )


def solve_upper(u: np.ndarray, b: np.ndarray, overwrite_b: bool = False) -> np.ndarray:
    """Solve U x = b for upper-triangular U without finiteness checks."""
    return scipy.linalg.solve_triangular(
        u, b, lower=False, check_finite=False, overwrite_b=overwrite_b
    )
