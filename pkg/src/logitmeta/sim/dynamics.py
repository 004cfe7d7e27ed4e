"""Monte Carlo regime: trajectories, hitting times and coupled chains.

All randomness comes from :mod:`logitmeta.rng` streams, one per replica, so
results depend only on ``(seed, replica, config)`` and never on how replicas
are scheduled across threads.  The per-step draw protocol is shared by the
reference stepper :func:`step` and both kernel backends.
"""
from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.stats import beta as beta_dist

from ..chain import update_distribution
from ..games import Family, GameError, GameSpec, check_profile, from_bits, to_bits
from ..rng import Stream, stream_key
from ._backend import get_kernels

FAMILY_CODE = {Family.OR: 0, Family.ISING: 1, Family.RING: 2}


@dataclass(frozen=True)
class SimConfig:
    steps: int
    replicas: int = 1
    seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Censored:
    """Hitting time not observed within ``cap`` steps."""

    cap: int


@dataclass
class CoupledPair:
    x: np.ndarray
    y: np.ndarray


# ---------------------------------------------------------------- kernel tables

def kernel_table(game: GameSpec) -> np.ndarray:
    """Probability of choosing bit 0 as a function of the local statistic.

    Entries are produced by :func:`update_distribution` on a representative
    profile, so kernels and the reference stepper agree to the last bit.
    """
    n = game.n
    fam = game.family
    zero, one = game.alphabet
    if fam is Family.OR:
        reps = [[0] * n, [0] * (n - 1) + [1]] if n > 1 else [[0]]
        table = [update_distribution(game, r, 0)[0] for r in reps]
        return np.array(table * (2 // len(table)), dtype=float)
    if fam is Family.ISING:
        table = []
        for m in range(n):
            prof = [zero] + [one] * m + [zero] * (n - 1 - m)
            table.append(update_distribution(game, prof, 0)[0])
        return np.array(table, dtype=float)
    if n == 1:
        return np.full(3, update_distribution(game, [0], 0)[0])
    table = []
    for zeros in range(3):
        prof = [0] * n
        if n == 2:
            prof[1] = 0 if zeros == 2 else 1
        else:
            prof[n - 1] = 0 if zeros >= 1 else 1
            prof[1] = 0 if zeros == 2 else 1
        table.append(update_distribution(game, prof, 0)[0])
    return np.array(table, dtype=float)


def _bits(game: GameSpec, profile) -> np.ndarray:
    return np.ascontiguousarray(to_bits(game, profile), dtype=np.uint8)


# ---------------------------------------------------------------- single steps

def step(game: GameSpec, profile: Sequence[int], rng: Stream) -> np.ndarray:
    """One logit step; the reference implementation of the kernels."""
    x = check_profile(game, profile).copy()
    i = rng.below(game.n)
    u = rng.uniform()
    sigma = update_distribution(game, x, i)
    x[i] = game.alphabet[0] if u < sigma[0] else game.alphabet[1]
    return x


def _coupled(game: GameSpec, gy: GameSpec, pair: CoupledPair, rng: Stream) -> CoupledPair:
    x = check_profile(game, pair.x).copy()
    y = check_profile(game, pair.y).copy()
    i = rng.below(game.n)
    u = rng.uniform()
    x[i] = 0 if u < update_distribution(game, x, i)[0] else 1
    y[i] = 0 if u < update_distribution(gy, y, i)[0] else 1
    return CoupledPair(x, y)


def precedes(x, y) -> bool:
    """Coordinatewise order used by the ring coupling: ``x_i >= y_i`` for all ``i``."""
    return bool(np.all(np.asarray(x) >= np.asarray(y)))


def monotone_coupled_step(game: GameSpec, pair: CoupledPair, rng: Stream) -> CoupledPair:
    """Move both ring chains with the same player and the same uniform.

    Player ``i`` takes strategy 0 in chain X iff ``U < sigma_i(0|x)`` and in
    chain Y iff ``U < sigma_i(0|y)``, which matches the two zero-probabilities
    as far as possible.  Order ``x`` preceding ``y`` is preserved.
    """
    if game.family is not Family.RING:
        raise GameError("the monotone coupling is defined for ring games only")
    return _coupled(game, game, pair, rng)


def or_coupled_step(game: GameSpec, pair: CoupledPair, rng: Stream) -> CoupledPair:
    """Couple the OR chain ``x`` with the beta=0 chain ``y``.

    Shared player and shared uniform: whenever ``y`` has at least two ones the
    OR player is indifferent and both chains take the same action; otherwise
    the two zero-probabilities are matched on a common interval.
    """
    if game.family is not Family.OR:
        raise GameError("the OR coupling needs an OR game")
    return _coupled(game, game.with_beta(0.0), pair, rng)


# ---------------------------------------------------------------- targets

@dataclass(frozen=True)
class Target:
    """Union of simple profile predicates the kernels evaluate in O(1).

    ``weights`` lists accepted numbers of 1-bits, ``exact`` an accepted bit
    vector and ``adjacent_zeros`` accepts profiles with two cyclically
    adjacent players on bit 0.
    """

    n: int
    weights: frozenset = frozenset()
    exact: Optional[tuple] = None
    adjacent_zeros: bool = False

    def weight_mask(self) -> np.ndarray:
        m = np.zeros(self.n + 1, dtype=np.uint8)
        for w in self.weights:
            m[w] = 1
        return m

    def exact_bits(self) -> np.ndarray:
        return np.array(self.exact if self.exact is not None else (), dtype=np.uint8)

    def contains(self, bits: Sequence[int]) -> bool:
        b = [int(v) for v in bits]
        if sum(b) in self.weights:
            return True
        if self.exact is not None and tuple(b) == self.exact:
            return True
        if self.adjacent_zeros and self.n >= 2:
            return any(b[j] == 0 and b[(j + 1) % self.n] == 0 for j in range(self.n))
        return False

    @classmethod
    def parse(cls, spec: str, n: int) -> "Target":
        """Parse ``"all-zeros|weight>=3|R"`` style unions (bits, not spins)."""
        weights: set = set()
        adj = False
        for part in spec.split("|"):
            key = part.strip()
            if key == "all-zeros":
                weights.add(0)
            elif key == "all-ones":
                weights.add(n)
            elif key == "R":
                adj = n >= 2
            else:
                m = re.match(r"^(weight|zeros)\s*(>=|<=|==)\s*(\d+)$", key)
                if not m:
                    raise ValueError(f"unknown target predicate {key!r}")
                k = int(m.group(3))
                op = m.group(2)
                for w in range(n + 1):
                    v = w if m.group(1) == "weight" else n - w
                    if (op == ">=" and v >= k) or (op == "<=" and v <= k) or (op == "==" and v == k):
                        weights.add(w)
        return cls(n, frozenset(weights), None, adj)

    @classmethod
    def state(cls, bits: Sequence[int]) -> "Target":
        b = tuple(int(v) for v in bits)
        return cls(len(b), frozenset(), b, False)


def _target(game: GameSpec, targets) -> Target:
    if isinstance(targets, Target):
        if targets.n != game.n:
            raise ValueError("target built for a different player count")
        return targets
    if isinstance(targets, str):
        return Target.parse(targets, game.n)
    raise TypeError("targets must be a Target or a predicate string")


# ---------------------------------------------------------------- hitting times

def hitting_time_sample(
    game: GameSpec,
    start: Sequence[int],
    targets: Union[Target, str, Callable[[np.ndarray], bool]],
    cap: int,
    rng: Stream,
    backend: Optional[str] = None,
) -> Union[int, Censored]:
    """First ``t <= cap`` with the predicate true, else ``Censored(cap)``.

    A callable predicate (on profiles in the game's alphabet) runs through the
    reference stepper; named predicates and :class:`Target` use the kernels.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if callable(targets) and not isinstance(targets, (Target, str)):
        x = check_profile(game, start)
        for t in range(cap + 1):
            if targets(x):
                return t
            if t < cap:
                x = step(game, x, rng)
        return Censored(cap)
    tgt = _target(game, targets)
    k = get_kernels(backend)
    bits = _bits(game, start)
    tau, rng.counter = k.hit_time(
        FAMILY_CODE[game.family], kernel_table(game), bits, rng.key, rng.counter, cap,
        tgt.weight_mask(), tgt.exact_bits(), int(tgt.adjacent_zeros),
    )
    return Censored(cap) if tau < 0 else int(tau)


@dataclass
class HittingSamples:
    tau: np.ndarray
    censored: np.ndarray
    cap: int

    def survival(self, t: int) -> float:
        """Empirical ``Prob(tau > t)``; censored samples count as exceeding ``t``."""
        if t >= self.cap:
            raise ValueError("survival beyond the cap is not identified")
        return float(np.mean(self.censored | (self.tau > t)))

    def cdf(self, t_max: int) -> np.ndarray:
        ts = np.arange(t_max + 1)
        hit = np.where(self.censored, np.iinfo(np.int64).max, self.tau)
        return (hit[None, :] <= ts[:, None]).mean(axis=1)


def _fan_out(fn, replicas: int, threads: Optional[int]):
    if threads is None or threads <= 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicas)))


def hitting_times(
    game: GameSpec,
    start: Sequence[int],
    targets: Union[Target, str],
    cap: int,
    replicas: int,
    seed: int = 0,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> HittingSamples:
    tgt = _target(game, targets)

    def one(r):
        return hitting_time_sample(game, start, tgt, cap, Stream(seed, r), backend)

    out = _fan_out(one, replicas, threads)
    cens = np.array([isinstance(v, Censored) for v in out])
    tau = np.array([-1 if isinstance(v, Censored) else v for v in out], dtype=np.int64)
    return HittingSamples(tau, cens, cap)


# ---------------------------------------------------------------- trajectories

@dataclass
class Trajectories:
    """Snapshots ``bits[replica, k]`` taken at ``t = k * record_every``."""

    bits: np.ndarray
    record_every: int
    n: int = field(init=False)

    def __post_init__(self):
        self.n = self.bits.shape[-1]

    def times(self) -> np.ndarray:
        return np.arange(self.bits.shape[1]) * self.record_every

    def state_indices(self) -> list:
        """Per replica, the list of state indices (Python ints, any ``n``)."""
        weights = [1 << (self.n - 1 - i) for i in range(self.n)]
        out = []
        for rep in self.bits:
            if self.n <= 62:
                w = np.array(weights, dtype=np.int64)
                out.append([int(v) for v in rep.astype(np.int64) @ w])
            else:
                out.append([sum(int(b) * w for b, w in zip(row, weights)) for row in rep])
        return out


def simulate(
    game: GameSpec,
    start: Sequence[int],
    config: SimConfig,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
) -> Trajectories:
    k = get_kernels(backend)
    table = kernel_table(game)
    fam = FAMILY_CODE[game.family]
    start_bits = _bits(game, start)
    nsnap = config.steps // config.record_every + 1
    out = np.empty((config.replicas, nsnap, game.n), dtype=np.uint8)

    def one(r):
        bits = start_bits.copy()
        k.run_chain(fam, table, bits, stream_key(config.seed, r), 0, config.steps, config.record_every, out[r])

    _fan_out(one, config.replicas, threads)
    return Trajectories(out, config.record_every)


def final_profiles(game: GameSpec, traj: Trajectories) -> list:
    return [from_bits(game, rep[-1]) for rep in traj.bits]


# ---------------------------------------------------------------- coupled runs

@dataclass(frozen=True)
class CouplingStats:
    tau_couple: int
    violations: int
    tau_zero_x: int
    eta: int
    x: tuple
    y: tuple


def coupled_run(
    game: GameSpec,
    x: Sequence[int],
    y: Sequence[int],
    steps: int,
    rng: Stream,
    kind: str = "monotone",
    backend: Optional[str] = None,
) -> CouplingStats:
    """Run a coupled pair for ``steps`` steps through the kernels.

    ``kind`` is ``"monotone"`` (ring), ``"or"`` (OR chain against the beta=0
    chain) or ``"shared"`` (same player and uniform, any family).  Times
    that did not occur are -1.
    """
    if kind == "monotone" and game.family is not Family.RING:
        raise GameError("the monotone coupling is defined for ring games only")
    if kind == "or" and game.family is not Family.OR:
        raise GameError("the OR coupling needs an OR game")
    if kind not in ("monotone", "or", "shared"):
        raise ValueError(f"unknown coupling {kind!r}")
    k = get_kernels(backend)
    ty = kernel_table(game.with_beta(0.0) if kind == "or" else game)
    bx, by = _bits(game, x), _bits(game, y)
    tau_c, viol, tau_z, eta, rng.counter = k.coupled_run(
        FAMILY_CODE[game.family], kernel_table(game), ty, bx, by, rng.key, rng.counter, steps
    )
    return CouplingStats(int(tau_c), int(viol), int(tau_z), int(eta), tuple(bx.tolist()), tuple(by.tolist()))


def one_step_counts(
    game: GameSpec,
    x: Sequence[int],
    trials: int,
    rng: Stream,
    y: Optional[Sequence[int]] = None,
    kind: str = "monotone",
    backend: Optional[str] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Move tallies of single (coupled) steps from fixed profiles.

    Entry ``i < n`` counts switches of player ``i``, entry ``n`` counts
    unchanged steps.  Without ``y`` the second chain is a copy of ``x``.
    """
    k = get_kernels(backend)
    ty = kernel_table(game.with_beta(0.0) if kind == "or" else game)
    bx = _bits(game, x)
    by = _bits(game, x if y is None else y)
    cx = np.zeros(game.n + 1, dtype=np.int64)
    cy = np.zeros(game.n + 1, dtype=np.int64)
    rng.counter = k.one_step_counts(
        FAMILY_CODE[game.family], kernel_table(game), ty, bx, by, rng.key, rng.counter, trials, cx, cy
    )
    return cx, cy


def counts_to_row(bits: Sequence[int], counts: np.ndarray) -> np.ndarray:
    """Spread move tallies onto the ``2**n`` state axis as frequencies."""
    b = np.asarray(bits, dtype=np.int64)
    n = len(b)
    idx = int(b @ (1 << np.arange(n - 1, -1, -1)))
    row = np.zeros(2 ** n)
    total = counts.sum()
    for i in range(n):
        row[idx ^ (1 << (n - 1 - i))] += counts[i] / total
    row[idx] += counts[n] / total
    return row


# ---------------------------------------------------------------- TV bounds

@dataclass(frozen=True)
class TVBoundEstimate:
    """Empirical coupling bound on ``max_{x,y in S} ||P^t(x,.) - P^t(y,.)||``.

    ``point`` is the plug-in value, ``upper`` a one-sided Clopper-Pearson
    bound at ``confidence`` (capped at 1), ``half_width`` the normal
    approximation half-width of ``point``.
    """

    point: float
    upper: float
    half_width: float
    confidence: float
    replicas: int
    method: str
    worst_start: tuple


def _cp_upper(k: int, n: int, confidence: float) -> float:
    if k >= n:
        return 1.0
    return float(beta_dist.ppf(confidence, k + 1, n - k))


def minimal_elements(profiles: Sequence[Sequence[int]]) -> list:
    """Profiles not strictly preceded by another one in the set."""
    arr = [np.asarray(p) for p in profiles]
    keep = []
    for i, p in enumerate(arr):
        dominated = any(j != i and precedes(q, p) and not np.array_equal(q, p) for j, q in enumerate(arr))
        if not dominated:
            keep.append(p)
    uniq = {tuple(int(v) for v in p): p for p in keep}
    return list(uniq.values())


def empirical_tv_bound(
    game: GameSpec,
    S: Sequence[Sequence[int]],
    t: int,
    replicas: int,
    seed: int = 0,
    confidence: float = 0.95,
    threads: Optional[int] = None,
    backend: Optional[str] = None,
    reduce: bool = True,
) -> TVBoundEstimate:
    """Upper-bound the worst-case distance between chains started in ``S``.

    Ring games use the monotone coupling: the bound is
    ``2 * max_z Prob_z(tau_0 > t)`` and, because that tail is monotone in the
    coupling order, only minimal elements of ``S`` need sampling when
    ``reduce`` is set.  Other families fall back to the pairwise estimator
    ``max_{x,y} Prob(tau_couple > t)`` under shared randomness.
    """
    starts = [tuple(int(v) for v in check_profile(game, s)) for s in S]
    if not starts:
        raise ValueError("start set is empty")
    if len(set(starts)) == 1:
        return TVBoundEstimate(0.0, 0.0, 0.0, confidence, replicas, "coalesced", starts[0])
    if t == 0:
        return TVBoundEstimate(1.0, 1.0, 0.0, confidence, replicas, "trivial", starts[0])
    if game.family is Family.RING:
        cands = minimal_elements([to_bits(game, s) for s in set(starts)]) if reduce else [to_bits(game, s) for s in set(starts)]
        cands.sort(key=lambda b: tuple(int(v) for v in b))
        worst, worst_k = None, -1
        for z_idx, z in enumerate(cands):
            sample = hitting_times(game, z, "all-zeros", t, replicas, seed=stream_key(seed, z_idx), threads=threads, backend=backend)
            k = int(np.sum(sample.censored | (sample.tau > t)))
            if k > worst_k:
                worst, worst_k = tuple(int(v) for v in z), k
        p = worst_k / replicas
        upper = min(1.0, 2 * _cp_upper(worst_k, replicas, confidence))
        hw = 2 * 1.96 * math.sqrt(max(p * (1 - p), 0.0) / replicas)
        return TVBoundEstimate(min(1.0, 2 * p), upper, hw, confidence, replicas, "monotone", worst)
    uniq = sorted(set(starts))
    worst, worst_k = None, -1
    pair_id = 0
    for a in range(len(uniq)):
        for b in range(a + 1, len(uniq)):
            base = stream_key(seed, pair_id)
            pair_id += 1

            def one(r, xa=uniq[a], yb=uniq[b], base=base):
                st = coupled_run(game, xa, yb, t, Stream(key=stream_key(base, r)), "shared", backend)
                return st.tau_couple < 0

            k = sum(_fan_out(one, replicas, threads))
            if k > worst_k:
                worst, worst_k = (uniq[a], uniq[b]), k
    p = worst_k / replicas
    hw = 1.96 * math.sqrt(max(p * (1 - p), 0.0) / replicas)
    return TVBoundEstimate(p, _cp_upper(worst_k, replicas, confidence), hw, confidence, replicas, "pairwise", worst)


def dkw_half_width(samples: int, alpha: float) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at confidence ``1 - alpha``."""
    return math.sqrt(math.log(2 / alpha) / (2 * samples))
