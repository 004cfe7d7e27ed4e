"""Exact regime: logit transition kernels, Gibbs measures and absorption.

Distributions are 1-D float arrays indexed by state (see
:func:`logitmeta.games.profile_index`).  Transition kernels are either dense
``ndarray`` matrices or :class:`LogitOperator` objects, which apply ``mu @ P``
without materialising ``P``; every function here accepts both.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .games import (
    Family,
    GameSpec,
    all_bits,
    check_player,
    check_profile,
    potential_vector,
    utility_vector,
    _utility,
)
from .linalg import SingularSystemError, solve_dense

STATE_CAP = 2 ** 20
DENSE_CAP = 2 ** 13


class StateSpaceTooLarge(ValueError):
    pass


class NonAbsorbingError(ValueError):
    """Some state reachable from the start never reaches the targets."""


@dataclass(frozen=True)
class StateSpace:
    n: int
    cap: int = STATE_CAP

    def __post_init__(self):
        if 2 ** self.n > self.cap:
            raise StateSpaceTooLarge(f"2^{self.n} states exceed the cap of {self.cap}")

    @property
    def count(self) -> int:
        return 2 ** self.n

    def encode(self, bits: Sequence[int]) -> int:
        idx = 0
        for b in bits:
            idx = (idx << 1) | int(b)
        return idx

    def decode(self, index: int) -> np.ndarray:
        return np.array([(index >> (self.n - 1 - i)) & 1 for i in range(self.n)], dtype=np.uint8)

    def bits(self) -> np.ndarray:
        return all_bits(self.n)

    def weights(self) -> np.ndarray:
        """Number of 1-bits of every state."""
        return self.bits().sum(axis=1).astype(np.int64)


# ---------------------------------------------------------------- update rule

def _sigma_pair(beta: float, u0: float, u1: float) -> tuple[float, float]:
    if math.isinf(beta):
        if u0 == u1:
            return 0.5, 0.5
        return (1.0, 0.0) if u0 > u1 else (0.0, 1.0)
    m = max(u0, u1)
    e0 = math.exp(beta * (u0 - m))
    e1 = math.exp(beta * (u1 - m))
    s = e0 + e1
    return e0 / s, e1 / s


def update_distribution(game: GameSpec, profile: Sequence[int], player: int) -> np.ndarray:
    """Logit choice probabilities of ``player`` over ``game.alphabet``."""
    x = check_profile(game, profile)
    i = check_player(game, player)
    utils = []
    for s in game.alphabet:
        y = x.copy()
        y[i] = s
        utils.append(_utility(game, y, i))
    return np.array(_sigma_pair(game.beta, utils[0], utils[1]))


def _sigma_vector(beta: float, u0: np.ndarray, u1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if math.isinf(beta):
        s0 = np.where(u0 > u1, 1.0, np.where(u0 == u1, 0.5, 0.0))
        return s0, 1.0 - s0
    m = np.maximum(u0, u1)
    e0 = np.exp(beta * (u0 - m))
    e1 = np.exp(beta * (u1 - m))
    s = e0 + e1
    return e0 / s, e1 / s


# ---------------------------------------------------------------- kernels

def _swap_player(v: np.ndarray, n: int, player: int) -> np.ndarray:
    """Permute the last axis by ``index -> index ^ (bit of player)``."""
    low = 2 ** (n - 1 - player)
    lead = v.shape[:-1]
    w = v.reshape(lead + (-1, 2, low))[..., ::-1, :]
    return w.reshape(lead + (-1,))


class LogitOperator:
    """Matrix-free logit kernel.

    ``flip[i, x]`` is ``P(x, x with player i switched)``, ``stay[x]`` is
    ``P(x, x)``.  Supports ``mu @ op`` for 1-D and stacked 2-D ``mu``.
    """

    __array_ufunc__ = None  # make ``ndarray @ op`` defer to __rmatmul__

    def __init__(self, n: int, flip: np.ndarray, stay: np.ndarray):
        self.n = n
        self.flip = flip
        self.stay = stay

    @property
    def shape(self) -> tuple[int, int]:
        return (self.stay.shape[0], self.stay.shape[0])

    def apply(self, mu: np.ndarray) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        if mu.shape[-1] != self.stay.shape[0]:
            raise ValueError(f"dimension mismatch: {mu.shape[-1]} vs {self.stay.shape[0]}")
        out = mu * self.stay
        for i in range(self.n):
            out += _swap_player(mu * self.flip[i], self.n, i)
        return out

    __rmatmul__ = apply

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        N = self.stay.shape[0]
        if N > cap:
            raise StateSpaceTooLarge(f"{N} states exceed the dense cap of {cap}")
        P = np.diag(self.stay)
        idx = np.arange(N)
        for i in range(self.n):
            P[idx, idx ^ (1 << (self.n - 1 - i))] = self.flip[i]
        return P

    def row(self, x: int) -> np.ndarray:
        e = np.zeros(self.stay.shape[0])
        e[x] = 1.0
        return self.apply(e)


Kernel = Union[np.ndarray, LogitOperator]


def logit_operator(game: GameSpec, cap: int = STATE_CAP) -> LogitOperator:
    """Matrix-free kernel of the logit dynamics (vector work up to ``cap`` states)."""
    space = StateSpace(game.n, cap)
    bits = space.bits()
    n = game.n
    flip = np.empty((n, space.count))
    stay = np.zeros(space.count)
    for i in range(n):
        b0 = bits.copy()
        b0[:, i] = 0
        b1 = bits.copy()
        b1[:, i] = 1
        s0, s1 = _sigma_vector(game.beta, utility_vector(game, b0, i), utility_vector(game, b1, i))
        cur = bits[:, i].astype(bool)
        flip[i] = np.where(cur, s0, s1) / n
        stay += np.where(cur, s1, s0)
    stay /= n
    return LogitOperator(n, flip, stay)


def build_transition_matrix(game: GameSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense logit transition matrix over all ``2**n`` profiles."""
    if game.num_states > cap:
        raise StateSpaceTooLarge(f"2^{game.n} states exceed the dense cap of {cap}")
    return logit_operator(game).to_dense(cap)


def gibbs_distribution(game: GameSpec, cap: int = STATE_CAP) -> np.ndarray:
    space = StateSpace(game.n, cap)
    phi = potential_vector(game, space.bits())
    if math.isinf(game.beta):
        w = (phi == phi.max()).astype(float)
        return w / w.sum()
    logw = game.beta * phi
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible dense kernel.

    Solves ``pi (I - P) = 0`` with the last equation replaced by the
    normalisation ``sum(pi) = 1``.
    """
    P = np.asarray(P, dtype=float)
    N = P.shape[0]
    A = (np.eye(N) - P).T
    A[-1, :] = 1.0
    rhs = np.zeros(N)
    rhs[-1] = 1.0
    return solve_dense(A, rhs)


# ---------------------------------------------------------------- distributions

def _as_dense(P: Kernel) -> np.ndarray:
    return P.to_dense() if isinstance(P, LogitOperator) else np.asarray(P, dtype=float)


def _check_dims(mu: np.ndarray, P: Kernel) -> None:
    if mu.shape[-1] != P.shape[0]:
        raise ValueError(f"dimension mismatch: distribution {mu.shape[-1]}, kernel {P.shape[0]}")


def iterate(mu: np.ndarray, P: Kernel, t: int) -> Iterator[np.ndarray]:
    """Yield ``mu P^s`` for ``s = 0..t``."""
    mu = np.asarray(mu, dtype=float)
    _check_dims(mu, P)
    yield mu
    for _ in range(t):
        mu = mu @ P
        yield mu


def evolve(mu: np.ndarray, P: Kernel, t: int) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be >= 0")
    for out in iterate(mu, P, t):
        pass
    return out


def tv_distance(mu: np.ndarray, nu: np.ndarray) -> Union[float, np.ndarray]:
    """Half-L1 distance; works row-wise on stacked inputs."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape[-1] != nu.shape[-1]:
        raise ValueError(f"dimension mismatch: {mu.shape[-1]} vs {nu.shape[-1]}")
    out = 0.5 * np.abs(mu - nu).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def point_mass(size: int, state: int) -> np.ndarray:
    e = np.zeros(size)
    e[state] = 1.0
    return e


def uniform(size: int) -> np.ndarray:
    return np.full(size, 1.0 / size)


# ---------------------------------------------------------------- subsets

_PRED = re.compile(r"^(weight|zeros)\s*(>=|<=|==)\s*(\d+)$")


def subset_mask(spec, size: int) -> np.ndarray:
    """Boolean mask from a mask, an index list or a named predicate.

    Named predicates: ``all-zeros``, ``all-ones``, ``R`` (two adjacent
    players on strategy 0, cyclically), ``weight>=k``/``<=``/``==`` on the
    number of 1-bits and the same for ``zeros``.
    """
    n = size.bit_length() - 1
    if isinstance(spec, str):
        key = spec.strip()
        if key == "all-zeros":
            mask = np.zeros(size, dtype=bool)
            mask[0] = True
            return mask
        if key == "all-ones":
            mask = np.zeros(size, dtype=bool)
            mask[size - 1] = True
            return mask
        bits = all_bits(n)
        if key == "R":
            z = bits == 0
            return (z & np.roll(z, -1, axis=1)).any(axis=1) if n >= 2 else np.zeros(size, dtype=bool)
        m = _PRED.match(key)
        if not m:
            raise ValueError(f"unknown subset predicate {spec!r}")
        ones = bits.sum(axis=1)
        value = ones if m.group(1) == "weight" else n - ones
        k = int(m.group(3))
        op = m.group(2)
        return value >= k if op == ">=" else value <= k if op == "<=" else value == k
    arr = np.asarray(spec)
    if arr.dtype == bool:
        if arr.shape != (size,):
            raise ValueError(f"mask must have length {size}")
        return arr.copy()
    mask = np.zeros(size, dtype=bool)
    idx = arr.astype(np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= size):
        raise ValueError("subset index out of range")
    mask[idx] = True
    return mask


def restricted_distribution(pi: np.ndarray, S) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    mask = subset_mask(S, pi.shape[0])
    mass = pi[mask].sum()
    if not mass > 0:
        raise ValueError("subset has zero stationary mass")
    out = np.where(mask, pi, 0.0)
    return out / mass


def bottleneck_ratio(P: Kernel, pi: np.ndarray, S) -> float:
    """``Q(S, S^c) / pi(S)`` computed from the kernel's entries."""
    pi = np.asarray(pi, dtype=float)
    mask = subset_mask(S, pi.shape[0])
    if not mask.any():
        raise ValueError("bottleneck ratio needs a nonempty subset")
    mass = pi[mask].sum()
    if not mass > 0:
        raise ValueError("subset has zero stationary mass")
    if isinstance(P, LogitOperator):
        flow = 0.0
        idx = np.arange(mask.shape[0])
        for i in range(P.n):
            other = idx ^ (1 << (P.n - 1 - i))
            leaving = mask & ~mask[other]
            flow += float((pi[leaving] * P.flip[i][leaving]).sum())
    else:
        P = np.asarray(P, dtype=float)
        flow = float(pi[mask] @ P[np.ix_(mask, ~mask)].sum(axis=1))
    return flow / mass


# ---------------------------------------------------------------- absorption

def _transient_system(P: np.ndarray, absorbing: np.ndarray, start: int):
    """Reachable transient states from ``start`` and the matrix ``I - P_TT``."""
    N = P.shape[0]
    adj = P.copy()
    adj[absorbing] = 0.0
    graph = csr_matrix(adj > 0)
    reach = np.zeros(N, dtype=bool)
    reach[breadth_first_order(graph, start, directed=True, return_predecessors=False)] = True
    trans = reach & ~absorbing
    # states that can reach the absorbing set, via reverse search
    rev = csr_matrix(graph.T)
    can = np.zeros(N, dtype=bool)
    for a in np.flatnonzero(absorbing):
        if not can[a]:
            can[breadth_first_order(rev, a, directed=True, return_predecessors=False)] = True
    stuck = trans & ~can
    if stuck.any():
        raise NonAbsorbingError(
            f"{int(stuck.sum())} reachable states never reach the targets (e.g. state {int(np.flatnonzero(stuck)[0])})"
        )
    T = np.flatnonzero(trans)
    PT = P[np.ix_(T, T)]
    A = -PT
    off = P[T].sum(axis=1) - P[T, T]
    A[np.arange(len(T)), np.arange(len(T))] = off
    return T, A


def absorbing_hit_probability(P: Kernel, targets_a, targets_b, start: int) -> float:
    """Probability of entering ``targets_a`` before ``targets_b`` from ``start``."""
    P = _as_dense(P)
    N = P.shape[0]
    A_mask = subset_mask(targets_a, N)
    B_mask = subset_mask(targets_b, N)
    if not A_mask.any() or not B_mask.any():
        raise ValueError("target sets must be nonempty")
    if (A_mask & B_mask).any():
        raise ValueError("target sets must be disjoint")
    if A_mask[start]:
        return 1.0
    if B_mask[start]:
        return 0.0
    T, M = _transient_system(P, A_mask | B_mask, start)
    rhs = P[np.ix_(T, np.flatnonzero(A_mask))].sum(axis=1)
    h = solve_dense(M, rhs)
    return float(h[np.searchsorted(T, start)])


def expected_absorption_time(P: Kernel, targets, start: int) -> float:
    P = _as_dense(P)
    N = P.shape[0]
    mask = subset_mask(targets, N)
    if not mask.any():
        raise ValueError("target set must be nonempty")
    if mask[start]:
        return 0.0
    T, M = _transient_system(P, mask, start)
    m = solve_dense(M, np.ones(len(T)))
    return float(m[np.searchsorted(T, start)])


def hitting_time_cdf(P: Kernel, targets, start: int, t_max: int) -> np.ndarray:
    """``[Prob(tau <= t) for t in 0..t_max]`` for the first entrance into ``targets``."""
    N = P.shape[0]
    mask = subset_mask(targets, N)
    if not 0 <= start < N:
        raise ValueError("start state out of range")
    cdf = np.empty(t_max + 1)
    if mask[start]:
        cdf[:] = 1.0
        return cdf
    v = point_mass(N, start)
    absorbed = 0.0
    cdf[0] = 0.0
    for t in range(1, t_max + 1):
        v = v @ P
        absorbed += float(v[mask].sum())
        v[mask] = 0.0
        cdf[t] = min(absorbed, 1.0)
    return cdf


def survival_function(P: Kernel, targets, t_max: int, starts=None) -> np.ndarray:
    """``Prob_x(tau > t)`` for ``t = 0..t_max``, one column per start.

    Runs the backward recursion ``s_{t+1} = P s_t`` with ``s`` pinned to 0 on
    the targets, so every start costs nothing extra.  ``starts`` defaults to
    all states.
    """
    P = _as_dense(P)
    N = P.shape[0]
    mask = subset_mask(targets, N)
    cols = np.arange(N) if starts is None else np.flatnonzero(subset_mask(starts, N))
    s = (~mask).astype(float)
    out = np.empty((t_max + 1, cols.size))
    out[0] = s[cols]
    for t in range(1, t_max + 1):
        s = P @ s
        s[mask] = 0.0
        out[t] = s[cols]
    return out


def logit_kernel(game: GameSpec, dense_cap: int = DENSE_CAP) -> Kernel:
    """Dense matrix when it fits under ``dense_cap``, otherwise the operator."""
    if game.num_states <= dense_cap:
        return build_transition_matrix(game, dense_cap)
    return logit_operator(game)


def toy_three_state(eps: float) -> np.ndarray:
    """Three-state chain: state 0 resamples, states 1 and 2 are sticky."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    h = (1 - eps) / 2
    return np.array([[eps, h, h], [eps, 1 - eps, 0.0], [eps, 0.0, 1 - eps]])


def is_family(game: GameSpec, family: Family) -> bool:
    return game.family is Family(family)
