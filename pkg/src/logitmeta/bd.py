"""Exit probabilities, exit times and hitting laws of birth-and-death chains."""
from __future__ import annotations

import math
import warnings
from typing import Optional, Sequence, Union

import numpy as np

from .linalg import SingularSystemError, solve_tridiagonal
from .projection import BirthDeathChain, RateError

SYMMETRIC_TOL = 1e-12


class DegenerateChainWarning(UserWarning):
    """A rate is zero, so the exit side is forced rather than computed."""


def ruin_probability_constant_rates(n: int, h: int, eps: float, delta: float) -> float:
    """Probability of reaching ``n`` before ``0`` from ``h``.

    Interior states move up with probability ``eps`` and down with ``delta``.
    The ratio ``delta / eps`` equal to 1 within 1e-12 uses the limit ``h/n``.
    """
    if not 0 <= h <= n or n < 1:
        raise ValueError(f"need 0 <= h <= n and n >= 1, got h={h}, n={n}")
    if eps < 0 or delta < 0 or eps + delta > 1 + 1e-15:
        raise ValueError("rates must be nonnegative with eps + delta <= 1")
    if h == 0:
        return 0.0
    if h == n:
        return 1.0
    if eps == 0:
        warnings.warn("eps = 0: the chain never moves up, exit at 0 is forced", DegenerateChainWarning)
        return 0.0
    if delta == 0:
        warnings.warn("delta = 0: the chain never moves down, exit at n is forced", DegenerateChainWarning)
        return 1.0
    ratio = delta / eps
    if abs(ratio - 1.0) < SYMMETRIC_TOL:
        return h / n
    lr = math.log(ratio)
    if ratio < 1:
        return math.expm1(h * lr) / math.expm1(n * lr)
    # rewrite with 1/ratio < 1 so no power overflows
    return math.exp(-(n - h) * lr) * math.expm1(-h * lr) / math.expm1(-n * lr)


def _interval(chain: BirthDeathChain, lo: int, hi: Optional[int]) -> tuple[int, int]:
    hi = chain.n if hi is None else hi
    if not 0 <= lo < hi <= chain.n:
        raise ValueError(f"need 0 <= lo < hi <= n, got lo={lo}, hi={hi}")
    return lo, hi


def _solve_interior(chain: BirthDeathChain, lo: int, hi: int, left: float, right: float, source: float):
    """Solve ``(p+q) v_k - p v_{k+1} - q v_{k-1} = source`` with ``v_lo, v_hi`` fixed."""
    p, q = chain.effective_rates()
    k = np.arange(lo + 1, hi)
    if k.size == 0:
        return np.zeros(0)
    pk, qk = p[k], q[k]
    diag = pk + qk
    rhs = np.full(k.size, float(source))
    rhs[0] += qk[0] * left
    rhs[-1] += pk[-1] * right
    try:
        return solve_tridiagonal(-qk, diag, -pk, rhs)
    except SingularSystemError as exc:
        raise RateError(f"the exit interval [{lo}, {hi}] is not reached from every interior state") from exc


def exit_probabilities(chain: BirthDeathChain, h: int, lo: int = 0, hi: Optional[int] = None) -> tuple[float, float]:
    """``(Prob(exit at lo), Prob(exit at hi))`` for the chain started at ``h``.

    Each side is solved as its own boundary-value problem, so a tiny
    probability keeps its relative accuracy instead of being ``1 - (1 - x)``.
    Holding probabilities do not enter the equations.
    """
    lo, hi = _interval(chain, lo, hi)
    if not lo <= h <= hi:
        raise ValueError(f"start {h} outside [{lo}, {hi}]")
    if h == lo:
        return 1.0, 0.0
    if h == hi:
        return 0.0, 1.0
    low = _solve_interior(chain, lo, hi, 1.0, 0.0, 0.0)[h - lo - 1]
    high = _solve_interior(chain, lo, hi, 0.0, 1.0, 0.0)[h - lo - 1]
    return float(low), float(high)


def ruin_probability(chain: BirthDeathChain, h: int, lo: int = 0, hi: Optional[int] = None) -> float:
    """Probability of reaching ``hi`` (default ``n``) before ``lo`` from ``h``."""
    return exit_probabilities(chain, h, lo, hi)[1]


def ruin_probabilities(chain: BirthDeathChain) -> np.ndarray:
    """Hit-``n``-before-``0`` probability from every start ``0..n``."""
    inner = _solve_interior(chain, 0, chain.n, 0.0, 1.0, 0.0)
    return np.concatenate([[0.0], inner, [1.0]])


def ruin_bound_geometric(chain: BirthDeathChain, h: int, alpha: float) -> float:
    """``alpha**h`` after checking ``q_k / p_k <= alpha < 1`` on the interior."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0 <= h <= chain.n:
        raise ValueError(f"start {h} outside [0, {chain.n}]")
    p, q = chain.effective_rates()
    k = np.arange(1, chain.n)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p[k] > 0, q[k] / p[k], np.inf)
    if ratio.size and ratio.max() > alpha:
        worst = int(k[np.argmax(ratio)])
        raise RateError(f"q/p = {ratio.max():.6g} exceeds alpha = {alpha:g} at state {worst}")
    return alpha ** h


def exit_time_expectation(chain: BirthDeathChain, h: int, lo: int = 0, hi: Optional[int] = None) -> float:
    """Expected time to leave ``(lo, hi)`` from ``h``."""
    lo, hi = _interval(chain, lo, hi)
    if not lo <= h <= hi:
        raise ValueError(f"start {h} outside [{lo}, {hi}]")
    if h in (lo, hi):
        return 0.0
    return float(_solve_interior(chain, lo, hi, 0.0, 0.0, 1.0)[h - lo - 1])


def _target_mask(chain: BirthDeathChain, targets: Union[Sequence[int], np.ndarray]) -> np.ndarray:
    arr = np.asarray(targets)
    if arr.dtype == bool:
        if arr.shape != (chain.n + 1,):
            raise ValueError("target mask has the wrong length")
        return arr
    mask = np.zeros(chain.n + 1, dtype=bool)
    mask[arr.astype(np.int64)] = True
    return mask


def hit_cdf_1d(chain: BirthDeathChain, targets, start: int, t_max: int) -> np.ndarray:
    """``Prob(tau <= t)`` for ``t = 0..t_max`` using O(n) work per step."""
    mask = _target_mask(chain, targets)
    if not 0 <= start <= chain.n:
        raise ValueError("start out of range")
    cdf = np.empty(t_max + 1)
    if mask[start]:
        cdf[:] = 1.0
        return cdf
    p, q = chain.effective_rates()
    r = chain.r
    v = np.zeros(chain.n + 1)
    v[start] = 1.0
    absorbed = 0.0
    cdf[0] = 0.0
    for t in range(1, t_max + 1):
        w = v * r
        w[1:] += v[:-1] * p[:-1]
        w[:-1] += v[1:] * q[1:]
        absorbed += float(w[mask].sum())
        w[mask] = 0.0
        v = w
        cdf[t] = min(absorbed, 1.0)
    return cdf
