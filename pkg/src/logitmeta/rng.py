"""Counter-based 64-bit random streams.

Every draw is a pure function of ``(key, counter)``::

    draw(key, c) = mix64(key + c * 0x9E3779B97F4A7C15  mod 2**64)

where ``mix64`` is the splitmix64 finaliser.  Replica ``r`` of a run seeded
with ``seed`` uses ``key = mix64(mix64(seed) ^ (r * 0xD1B54A32D192ED03))``
and starts at counter 0, so replicas never share state and can run in any
order or on any thread.

A single logit step consumes two counters: ``c`` selects the player,
``c + 1`` is the uniform used for the strategy draw.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
REPLICA_MULT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def draw(key: int, counter: int) -> int:
    return mix64(key + counter * GOLDEN)


def to_uniform(z: int) -> float:
    """Top 53 bits as a double in [0, 1)."""
    return (z >> 11) * (1.0 / 9007199254740992.0)


def to_below(z: int, n: int) -> int:
    """Integer in ``[0, n)`` from the top 32 bits (multiply-shift)."""
    return ((z >> 32) * n) >> 32


def stream_key(seed: int, replica: int = 0) -> int:
    return mix64(mix64(seed) ^ ((replica * REPLICA_MULT) & MASK64))


class Stream:
    """Mutable cursor over one counter-based stream."""

    __slots__ = ("key", "counter")

    def __init__(self, seed: int = 0, replica: int = 0, *, key: int | None = None, counter: int = 0):
        self.key = stream_key(seed, replica) if key is None else key & MASK64
        self.counter = counter

    def next_u64(self) -> int:
        z = draw(self.key, self.counter)
        self.counter += 1
        return z

    def uniform(self) -> float:
        return to_uniform(self.next_u64())

    def below(self, n: int) -> int:
        if not 1 <= n < 2 ** 32:
            raise ValueError("range must be in [1, 2**32)")
        return to_below(self.next_u64(), n)

    def __repr__(self):
        return f"Stream(key={self.key:#018x}, counter={self.counter})"
