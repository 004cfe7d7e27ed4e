"""Potential games played under logit dynamics.

Three families are supported, all with two strategies per player:

* ``or``    -- every player pays the OR of all strategies.
* ``ising`` -- Curie-Weiss spins in {-1, +1}, utility ``x_i * sum_{j != i} x_j``.
* ``ring``  -- each player plays a 2x2 coordination game with both ring
  neighbours, payoffs ``a`` (0 vs 0), ``b`` (1 vs 1), ``c`` (0 vs 1),
  ``d`` (1 vs 0).

Profiles are stored in the family's alphabet ({0, 1} or {-1, +1}). State
indices always use the bit encoding ``bit = 1`` for strategy 1 / spin +1,
with player 0 as the most significant bit, so that index order equals
lexicographic profile order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np


class Family(str, Enum):
    OR = "or"
    ISING = "ising"
    RING = "ring"


class GameError(ValueError):
    """Invalid game parameters, profile or player index."""


@dataclass(frozen=True)
class GameSpec:
    family: Family
    n: int
    beta: float = 0.0
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    d: Optional[float] = None
    alphabet: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if int(self.n) != self.n or self.n < 1:
            raise GameError(f"player count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not self.beta >= 0:
            raise GameError(f"beta must be >= 0, got {self.beta!r}")
        object.__setattr__(self, "beta", float(self.beta))
        if self.family is Family.RING:
            if None in (self.a, self.b, self.c, self.d):
                raise GameError("ring game needs payoffs a, b, c, d")
            for name in "abcd":
                object.__setattr__(self, name, float(getattr(self, name)))
            if not (self.a > self.d and self.b > self.c):
                raise GameError("ring game requires a > d and b > c")
            if self.big_delta < self.small_delta:
                raise GameError("ring game requires a - d >= b - c (strategy 0 weakly risk dominant)")
        alphabet = (-1, 1) if self.family is Family.ISING else (0, 1)
        object.__setattr__(self, "alphabet", alphabet)

    @property
    def big_delta(self) -> float:
        """Coordination gain on strategy 0, ``a - d``."""
        return self.a - self.d

    @property
    def small_delta(self) -> float:
        """Coordination gain on strategy 1, ``b - c``."""
        return self.b - self.c

    @property
    def num_states(self) -> int:
        return 2 ** self.n

    def with_beta(self, beta: float) -> "GameSpec":
        return GameSpec(self.family, self.n, beta, self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        out = {"family": self.family.value, "n": self.n, "beta": self.beta}
        if self.family is Family.RING:
            out.update(a=self.a, b=self.b, c=self.c, d=self.d)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "GameSpec":
        try:
            family = Family(obj["family"])
            n = obj["n"]
        except KeyError as exc:
            raise GameError(f"game object missing key {exc.args[0]!r}") from None
        except ValueError:
            raise GameError(f"unknown game family {obj.get('family')!r}") from None
        payoffs = {k: obj.get(k) for k in "abcd"}
        return cls(family, n, obj.get("beta", 0.0), **payoffs)

    @classmethod
    def from_json(cls, text: str) -> "GameSpec":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def or_game(n: int, beta: float = 0.0) -> GameSpec:
    return GameSpec(Family.OR, n, beta)


def ising_game(n: int, beta: float = 0.0) -> GameSpec:
    return GameSpec(Family.ISING, n, beta)


def ring_game(n: int, beta: float, a: float, b: float, c: float, d: float) -> GameSpec:
    return GameSpec(Family.RING, n, beta, a, b, c, d)


def two_player_coordination(beta: float, a: float, b: float, c: float, d: float) -> GameSpec:
    """Single 2x2 coordination game between two players.

    On a 2-ring every player meets the other one twice, so the payoffs are
    halved to recover one play of the basic game per step.
    """
    return ring_game(2, beta, a / 2, b / 2, c / 2, d / 2)


# ---------------------------------------------------------------- profiles

def check_profile(game: GameSpec, profile: Sequence[int]) -> np.ndarray:
    x = np.asarray(profile)
    if x.ndim != 1 or x.shape[0] != game.n:
        raise GameError(f"profile must have length {game.n}, got shape {x.shape}")
    if not np.isin(x, game.alphabet).all():
        raise GameError(f"profile entries must lie in {game.alphabet}")
    return x.astype(np.int64)


def check_player(game: GameSpec, player: int) -> int:
    if not (0 <= int(player) < game.n) or int(player) != player:
        raise GameError(f"player index {player!r} out of range for n={game.n}")
    return int(player)


def to_bits(game: GameSpec, profile: Sequence[int]) -> np.ndarray:
    x = check_profile(game, profile)
    if game.family is Family.ISING:
        return ((x + 1) // 2).astype(np.uint8)
    return x.astype(np.uint8)


def from_bits(game: GameSpec, bits: Sequence[int]) -> np.ndarray:
    bb = np.asarray(bits, dtype=np.int64)
    if game.family is Family.ISING:
        return 2 * bb - 1
    return bb


def profile_index(game: GameSpec, profile: Sequence[int]) -> int:
    bits = to_bits(game, profile)
    idx = 0
    for bit in bits:
        idx = (idx << 1) | int(bit)
    return idx


def index_profile(game: GameSpec, index: int) -> np.ndarray:
    if not 0 <= index < game.num_states:
        raise GameError(f"state index {index} out of range")
    bits = [(index >> (game.n - 1 - i)) & 1 for i in range(game.n)]
    return from_bits(game, bits)


# ---------------------------------------------------------------- payoffs

def _ring_payoff(game: GameSpec, mine: int, theirs: int) -> float:
    if mine == 0:
        return game.a if theirs == 0 else game.c
    return game.d if theirs == 0 else game.b


def _ring_edge_potential(game: GameSpec, left: int, right: int) -> float:
    if left != right:
        return 0.0
    return game.big_delta if left == 0 else game.small_delta


def _utility(game: GameSpec, x: np.ndarray, i: int) -> float:
    n = game.n
    if game.family is Family.OR:
        return 0.0 if not x.any() else -1.0
    if game.family is Family.ISING:
        return float(x[i] * (x.sum() - x[i]))
    if n == 1:
        return 2.0 * _ring_payoff(game, int(x[0]), int(x[0]))
    return _ring_payoff(game, int(x[i]), int(x[(i - 1) % n])) + _ring_payoff(
        game, int(x[i]), int(x[(i + 1) % n])
    )


def utility(game: GameSpec, profile: Sequence[int], player: int) -> float:
    """Payoff of ``player`` at ``profile``."""
    return _utility(game, check_profile(game, profile), check_player(game, player))


def _potential(game: GameSpec, x: np.ndarray) -> float:
    n = game.n
    if game.family is Family.OR:
        return 0.0 if not x.any() else -1.0
    if game.family is Family.ISING:
        s = int(x.sum())
        return 0.5 * (s * s - n)
    if n == 1:
        # a one-player game: its own utility is an exact potential
        return _utility(game, x, 0)
    return float(sum(_ring_edge_potential(game, int(x[i]), int(x[(i + 1) % n])) for i in range(n)))


def potential(game: GameSpec, profile: Sequence[int]) -> float:
    return _potential(game, check_profile(game, profile))


def potential_difference_check(
    game: GameSpec, profile: Sequence[int], player: int, new_strategy: int
) -> tuple[float, float]:
    """Return ``(du, dphi)`` for a unilateral deviation of ``player``.

    Both are ``new - old``; in a potential game they coincide.
    """
    x = check_profile(game, profile)
    i = check_player(game, player)
    if new_strategy not in game.alphabet:
        raise GameError(f"strategy {new_strategy!r} not in {game.alphabet}")
    y = x.copy()
    y[i] = new_strategy
    return _utility(game, y, i) - _utility(game, x, i), _potential(game, y) - _potential(game, x)


@dataclass(frozen=True)
class ProfileStats:
    zeros: int
    ones: int
    magnetization: Optional[int] = None
    level: Optional[int] = None
    singleton_zero_blocks: Optional[int] = None
    singleton_one_blocks: Optional[int] = None


def _ring_blocks(bits: np.ndarray) -> tuple[int, int, int]:
    n = len(bits)
    if bits.min() == bits.max():
        return 0, 0, 0
    level = s0 = s1 = 0
    for i in range(n):
        cur, left, right = bits[i], bits[(i - 1) % n], bits[(i + 1) % n]
        if cur == 0 and left == 1:
            level += 1
        if left != cur and right != cur:
            if cur == 0:
                s0 += 1
            else:
                s1 += 1
    return level, s0, s1


def profile_stats(game: GameSpec, profile: Sequence[int]) -> ProfileStats:
    bits = to_bits(game, profile)
    ones = int(bits.sum())
    zeros = game.n - ones
    if game.family is Family.ISING:
        return ProfileStats(zeros, ones, magnetization=ones - zeros)
    if game.family is Family.RING:
        level, s0, s1 = _ring_blocks(bits)
        return ProfileStats(zeros, ones, level=level, singleton_zero_blocks=s0, singleton_one_blocks=s1)
    return ProfileStats(zeros, ones)


# ---------------------------------------------------------------- vectorised over all states

def all_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array of bits; row ``k`` is state index ``k``."""
    idx = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def utility_vector(game: GameSpec, bits: np.ndarray, player: int) -> np.ndarray:
    """Utility of ``player`` on every row of a bit matrix."""
    n = game.n
    bits = np.asarray(bits, dtype=np.int64)
    if game.family is Family.OR:
        return np.where(bits.any(axis=1), -1.0, 0.0)
    if game.family is Family.ISING:
        spins = 2 * bits - 1
        return (spins[:, player] * (spins.sum(axis=1) - spins[:, player])).astype(float)
    pay = np.array([[game.a, game.c], [game.d, game.b]])
    mine = bits[:, player]
    if n == 1:
        return 2.0 * pay[mine, mine]
    return pay[mine, bits[:, (player - 1) % n]] + pay[mine, bits[:, (player + 1) % n]]


def potential_vector(game: GameSpec, bits: np.ndarray) -> np.ndarray:
    n = game.n
    bits = np.asarray(bits, dtype=np.int64)
    if game.family is Family.OR:
        return np.where(bits.any(axis=1), -1.0, 0.0)
    if game.family is Family.ISING:
        s = 2 * bits.sum(axis=1) - n
        return 0.5 * (s * s - n)
    if n == 1:
        return utility_vector(game, bits, 0)
    edge = np.array([[game.big_delta, 0.0], [0.0, game.small_delta]])
    return edge[bits, np.roll(bits, -1, axis=1)].sum(axis=1)
