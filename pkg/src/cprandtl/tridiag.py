"""Vectorized Thomas solver for batches of tridiagonal systems.

The implicit diffusion step couples nodes along eta only, so each
(time level, x column) contributes an independent tridiagonal system.
The batch axis is leading; the sweep runs along the last axis with a fixed
summation order, which keeps results bit-identical run to run.
"""

import numpy as np

from .errors import NumericalError

__all__ = ["solve_tridiagonal"]


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve the systems  lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].

    All arguments are arrays of shape (..., n); lower[..., 0] and
    upper[..., n-1] are ignored.  Returns x with the same shape.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.shape[-1]
    cp = np.empty_like(diag)
    dp = np.empty_like(rhs)
    denom = diag[..., 0]
    if np.any(denom == 0.0):
        raise NumericalError("tridiagonal solve hit a zero pivot in row 0")
    cp[..., 0] = upper[..., 0] / denom
    dp[..., 0] = rhs[..., 0] / denom
    for i in range(1, n):
        denom = diag[..., i] - lower[..., i] * cp[..., i - 1]
        if np.any(denom == 0.0):
            raise NumericalError(f"tridiagonal solve hit a zero pivot in row {i}")
        cp[..., i] = upper[..., i] / denom
        dp[..., i] = (rhs[..., i] - lower[..., i] * dp[..., i - 1]) / denom
    x = np.empty_like(rhs)
    x[..., n - 1] = dp[..., n - 1]
    for i in range(n - 2, -1, -1):
        x[..., i] = dp[..., i] - cp[..., i] * x[..., i + 1]
    return x
