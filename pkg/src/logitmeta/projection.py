"""One-dimensional lumped chains and an exact lumpability test."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

RATE_TOL = 1e-12


class RateError(ValueError):
    pass


@dataclass(frozen=True)
class BirthDeathChain:
    """Birth-and-death chain on ``{0, ..., n}``.

    ``p[k]`` moves up, ``q[k]`` moves down, the remainder stays.  Endpoints
    flagged in ``absorbing`` keep all their mass whatever their rates say.
    ``labels`` is an optional relabelling of the states (e.g. magnetisation).
    """

    p: np.ndarray
    q: np.ndarray
    absorbing: tuple = (False, False)
    labels: Optional[np.ndarray] = None
    n: int = field(init=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        if p.ndim != 1 or p.shape != q.shape or p.size < 2:
            raise RateError("p and q must be 1-D arrays of equal length >= 2")
        if (p < 0).any() or (q < 0).any():
            raise RateError(f"negative rate at state {int(np.flatnonzero((p < 0) | (q < 0))[0])}")
        over = p + q > 1 + RATE_TOL
        if over.any():
            raise RateError(f"p + q exceeds 1 at state {int(np.flatnonzero(over)[0])}")
        if q[0] != 0 or p[-1] != 0:
            raise RateError("q[0] and p[n] must be zero")
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "absorbing", (bool(self.absorbing[0]), bool(self.absorbing[1])))
        object.__setattr__(self, "n", p.size - 1)
        if self.labels is not None:
            lab = np.array(self.labels)
            if lab.shape != p.shape:
                raise RateError("labels must have one entry per state")
            lab.flags.writeable = False
            object.__setattr__(self, "labels", lab)

    def effective_rates(self) -> tuple[np.ndarray, np.ndarray]:
        """Rates with absorbing endpoints zeroed."""
        p, q = self.p.copy(), self.q.copy()
        if self.absorbing[0]:
            p[0] = 0.0
        if self.absorbing[1]:
            q[-1] = 0.0
        return p, q

    @property
    def r(self) -> np.ndarray:
        p, q = self.effective_rates()
        return np.clip(1.0 - p - q, 0.0, 1.0)

    def label(self, k: int):
        return k if self.labels is None else self.labels[k]

    def index_of(self, label) -> int:
        if self.labels is None:
            return int(label)
        hits = np.flatnonzero(self.labels == label)
        if hits.size == 0:
            raise KeyError(f"no state labelled {label!r}")
        return int(hits[0])

    def with_absorbing(self, low: bool = True, high: bool = True) -> "BirthDeathChain":
        return BirthDeathChain(self.p, self.q, (low, high), self.labels)

    def to_matrix(self) -> np.ndarray:
        p, q = self.effective_rates()
        P = np.diag(self.r)
        k = np.arange(self.n)
        P[k, k + 1] = p[:-1]
        P[k + 1, k] = q[1:]
        return P

    def stationary(self) -> np.ndarray:
        """Stationary law from detailed balance (irreducible chains only)."""
        p, q = self.effective_rates()
        if (p[:-1] <= 0).any() or (q[1:] <= 0).any():
            raise RateError("stationary law via detailed balance needs an irreducible chain")
        logw = np.concatenate([[0.0], np.cumsum(np.log(p[:-1]) - np.log(q[1:]))])
        w = np.exp(logw - logw.max())
        return w / w.sum()

    # ------------------------------------------------------------ CSV
    def to_csv(self) -> str:
        p, q = self.effective_rates()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "p", "q", "r", "label"])
        r = self.r
        for k in range(self.n + 1):
            lab = self.label(k)
            w.writerow([k, f"{p[k]:.17g}", f"{q[k]:.17g}", f"{r[k]:.17g}", lab if isinstance(lab, str) else f"{lab:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BirthDeathChain":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise RateError("empty rate table")
        missing = {"k", "p", "q"} - set(rows[0])
        if missing:
            raise RateError(f"rate table lacks columns {sorted(missing)}")
        rows.sort(key=lambda row: int(row["k"]))
        ks = [int(row["k"]) for row in rows]
        if ks != list(range(len(rows))):
            raise RateError("states must be numbered 0..n without gaps")
        p = [float(row["p"]) for row in rows]
        q = [float(row["q"]) for row in rows]
        labels = None
        if "label" in rows[0] and all(row.get("label") not in (None, "") for row in rows):
            labels = np.array([float(row["label"]) for row in rows])
            if np.all(labels == np.round(labels)):
                labels = labels.astype(np.int64)
            if np.array_equal(labels, np.arange(len(rows))):
                labels = None
        return cls(np.array(p), np.array(q), (p[0] == 0.0, q[-1] == 0.0), labels)


# ---------------------------------------------------------------- constructors

def ehrenfest(n: int) -> BirthDeathChain:
    if n < 1:
        raise RateError("n must be >= 1")
    k = np.arange(n + 1)
    return BirthDeathChain((n - k) / n, k / n)


def lazy(chain: BirthDeathChain) -> BirthDeathChain:
    """Chain with kernel ``(P + I) / 2``."""
    return BirthDeathChain(chain.p / 2, chain.q / 2, chain.absorbing, chain.labels)


def constant_rate_chain(n: int, up: float, down: float) -> BirthDeathChain:
    """Rates ``up``/``down`` in the interior, both endpoints absorbing."""
    p = np.full(n + 1, float(up))
    q = np.full(n + 1, float(down))
    p[0] = p[-1] = 0.0
    q[0] = q[-1] = 0.0
    return BirthDeathChain(p, q, (True, True))


def or_projection(n: int, beta: float) -> BirthDeathChain:
    """Number of players on strategy 1 under the OR-game logit dynamics."""
    if n < 2:
        raise RateError("the OR projection needs n >= 2")
    i = np.arange(n + 1, dtype=float)
    p = (n - i) / (2 * n)
    q = i / (2 * n)
    # leaving all-zeros costs the deviating player 1; from weight 1 only the
    # lone 1-player is not indifferent
    p[0] = expit(-beta)
    q[1] = expit(beta) / n
    return BirthDeathChain(p, q)


def magnetization_chain(n: int, beta: float) -> BirthDeathChain:
    """Curie-Weiss magnetisation; index ``j`` carries label ``2j - n``."""
    if n < 2:
        raise RateError("the magnetisation chain needs n >= 2")
    j = np.arange(n + 1)
    k = (2 * j - n).astype(float)
    p = (n - k) / (2 * n) * expit(2 * (k + 1) * beta)
    q = (n + k) / (2 * n) * expit(-2 * (k - 1) * beta)
    return BirthDeathChain(p, q, labels=(2 * j - n))


# ---------------------------------------------------------------- lumping

@dataclass(frozen=True)
class LumpReport:
    """Lumped kernel plus the largest within-block spread of block masses."""

    lumped: np.ndarray
    max_deviation: float
    worst_block: int
    blocks: tuple


def lumpability_check(P: np.ndarray, partition) -> LumpReport:
    """Check ``sum_{y in B'} P(x, y)`` is constant over ``x`` in each block ``B``.

    ``partition`` is either one label per state or a list of index lists.
    The lumped row of a block is the mean over its members.
    """
    P = np.asarray(P, dtype=float)
    N = P.shape[0]
    if isinstance(partition, (list, tuple)) and partition and not np.isscalar(partition[0]):
        labels = np.full(N, -1, dtype=np.int64)
        for b, members in enumerate(partition):
            labels[np.asarray(members, dtype=np.int64)] = b
    else:
        labels = np.asarray(partition, dtype=np.int64)
        if labels.shape != (N,):
            raise ValueError(f"partition needs {N} labels")
    if (labels < 0).any():
        raise ValueError("partition does not cover every state")
    uniq, inv = np.unique(labels, return_inverse=True)
    m = uniq.size
    indicator = np.zeros((N, m))
    indicator[np.arange(N), inv] = 1.0
    mass = P @ indicator
    lumped = np.zeros((m, m))
    worst, worst_b = 0.0, 0
    for b in range(m):
        rows = mass[inv == b]
        lumped[b] = rows.mean(axis=0)
        dev = float((rows.max(axis=0) - rows.min(axis=0)).max())
        if dev > worst:
            worst, worst_b = dev, b
    return LumpReport(lumped, worst, worst_b, tuple(int(u) for u in uniq))


def weight_partition(n: int) -> np.ndarray:
    """Number of 1-bits of every state index (Hamming weight / magnetisation block)."""
    idx = np.arange(2 ** n)
    return np.array([bin(int(i)).count("1") for i in idx], dtype=np.int64)


def chain_from_matrix(P: np.ndarray) -> BirthDeathChain:
    """Read rates back from a tridiagonal matrix."""
    P = np.asarray(P, dtype=float)
    N = P.shape[0]
    off = P - np.diag(np.diag(P)) - np.diag(np.diag(P, 1), 1) - np.diag(np.diag(P, -1), -1)
    if np.abs(off).max(initial=0.0) > RATE_TOL:
        raise RateError("matrix is not tridiagonal")
    p = np.append(np.diag(P, 1), 0.0)
    q = np.insert(np.diag(P, -1), 0, 0.0)
    return BirthDeathChain(p, q)

