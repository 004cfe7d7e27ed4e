"""Linear solvers shared by the exact and birth-and-death code paths."""
from __future__ import annotations

import numpy as np
import scipy.linalg

PIVOT_TOL = 1e-13


class SingularSystemError(ArithmeticError):
    """The absorption system has no unique solution."""


def solve_dense(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """LU solve with partial pivoting, rejecting near-zero pivots.

    Rows are equilibrated by their largest entry first so the pivot
    threshold is scale free.
    """
    A = np.array(A, dtype=float)
    rhs = np.array(rhs, dtype=float)
    if A.shape[0] == 0:
        return rhs.copy()
    scale = np.abs(A).max(axis=1)
    if (scale == 0).any():
        raise SingularSystemError("system has an all-zero row")
    A /= scale[:, None]
    rhs = rhs / (scale if rhs.ndim == 1 else scale[:, None])
    lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_TOL:
        raise SingularSystemError(f"pivot {pivots.min():.3e} below {PIVOT_TOL:g}")
    return scipy.linalg.lu_solve((lu, piv), rhs)


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Thomas algorithm for ``lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]``.

    ``lower[0]`` and ``upper[-1]`` are ignored. Falls back to a pivoted dense
    solve when elimination produces a vanishing pivot.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m = len(diag)
    if m == 0:
        return np.zeros(0)
    cp = np.empty(m)
    dp = np.empty(m)
    denom = diag[0]
    ok = abs(denom) > PIVOT_TOL * max(abs(diag[0]), abs(upper[0]), 1e-300)
    if ok:
        cp[0] = upper[0] / denom
        dp[0] = rhs[0] / denom
        for k in range(1, m):
            denom = diag[k] - lower[k] * cp[k - 1]
            scale = max(abs(diag[k]), abs(lower[k]), abs(upper[k]))
            if not abs(denom) > PIVOT_TOL * scale:
                ok = False
                break
            cp[k] = upper[k] / denom
            dp[k] = (rhs[k] - lower[k] * dp[k - 1]) / denom
    if not ok:
        A = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
        return solve_dense(A, rhs)
    x = np.empty(m)
    x[-1] = dp[-1]
    for k in range(m - 2, -1, -1):
        x[k] = dp[k] - cp[k] * x[k + 1]
    return x
