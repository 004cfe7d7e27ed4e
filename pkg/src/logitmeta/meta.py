"""Metastability certificates, pseudo-mixing times and the bounds built on them.

A distribution ``mu`` is (eps, T)-metastable for a kernel ``P`` when
``||mu P^t - mu||_TV <= eps`` for all ``t <= T``.  The pseudo-mixing time of
``mu`` from a start set ``S`` is the first ``t`` at which every chain started
in ``S`` is within ``eps`` of ``mu``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chain import Kernel, iterate, subset_mask, tv_distance

EXACT = "exact"
AMPLIFIED = "amplified"


@dataclass(frozen=True)
class MetastabilityCertificate:
    """Outcome of a metastability check for ``mu`` at budget ``epsilon_tv``.

    ``drift_curve[t]`` is ``||mu P^t - mu||`` for exact certificates (it may
    stop early when ``horizon_checked < T``).  Amplified certificates keep only
    the one-step drift and its linear bound ``one_step_drift * T``.
    """

    mu: np.ndarray = field(repr=False)
    epsilon_tv: float
    T: int
    mode: str
    one_step_drift: float
    drift_curve: Optional[np.ndarray] = field(default=None, repr=False)
    horizon_checked: int = 0
    mu_id: str = "mu"

    @property
    def drift_max(self) -> float:
        if self.mode == EXACT:
            return float(self.drift_curve.max()) if self.drift_curve is not None and self.drift_curve.size else 0.0
        return amplify(self.one_step_drift, self.T)

    @property
    def valid(self) -> bool:
        return self.horizon_checked >= self.T and self.drift_max <= self.epsilon_tv

    def to_dict(self, curve_file: Optional[str] = None) -> dict:
        return {
            "mu": self.mu_id,
            "epsilon_tv": self.epsilon_tv,
            "T": self.T,
            "mode": self.mode,
            "driftMax": self.drift_max,
            "curveFile": curve_file,
        }

    def to_json(self, curve_file: Optional[str] = None) -> str:
        return json.dumps(self.to_dict(curve_file))


def certify_exact(
    mu: np.ndarray,
    P: Kernel,
    epsilon_tv: float,
    T: int,
    mu_id: str = "mu",
    stop_on_violation: bool = False,
) -> MetastabilityCertificate:
    """Iterate ``mu P^t`` for ``t <= T`` and record the full drift curve.

    With ``stop_on_violation`` the curve ends at the first ``t`` whose drift
    exceeds the budget, and ``horizon_checked`` reports that ``t``.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    mu = np.asarray(mu, dtype=float)
    curve = np.empty(T + 1)
    last = 0
    for t, nu in enumerate(iterate(mu, P, T)):
        curve[t] = tv_distance(nu, mu)
        last = t
        if stop_on_violation and curve[t] > epsilon_tv:
            break
    curve = curve[: last + 1]
    one = float(curve[1]) if curve.size > 1 else float(tv_distance(mu @ P, mu))
    horizon = last if (stop_on_violation and curve[-1] > epsilon_tv) else T
    return MetastabilityCertificate(mu, float(epsilon_tv), int(T), EXACT, one, curve, horizon, mu_id)


def amplify(one_step_drift: float, T: int) -> float:
    """Budget certified at horizon ``T`` by a one-step drift (triangle inequality)."""
    if one_step_drift < 0:
        raise ValueError("drift must be nonnegative")
    return one_step_drift * T


def certify_amplified(mu: np.ndarray, P: Kernel, epsilon_tv: float, T: Optional[int] = None, mu_id: str = "mu"):
    """One-step certificate; ``T`` defaults to the longest horizon the budget allows."""
    mu = np.asarray(mu, dtype=float)
    d = float(tv_distance(mu @ P, mu))
    if T is None:
        T = int(math.floor(epsilon_tv / d)) if d > 0 else np.iinfo(np.int64).max
    return MetastabilityCertificate(mu, float(epsilon_tv), int(T), AMPLIFIED, d, None, int(T), mu_id)


# ---------------------------------------------------------------- pseudo-mixing

@dataclass(frozen=True)
class PseudoMixReport:
    """First time every start in ``starts`` is within ``epsilon_tv`` of ``mu``.

    ``t_found`` is ``None`` when the cap was reached first.  ``curve[t]`` is
    ``max_{x in starts} ||P^t(x, .) - mu||``.
    """

    mu: np.ndarray = field(repr=False)
    starts: tuple
    epsilon_tv: float
    t_found: Optional[int]
    cap: int
    curve: np.ndarray = field(repr=False)
    mu_id: str = "mu"

    @property
    def found(self) -> bool:
        return self.t_found is not None

    def to_dict(self) -> dict:
        return {
            "mu": self.mu_id,
            "starts": list(self.starts),
            "epsilon_tv": self.epsilon_tv,
            "tFound": self.t_found,
            "cap": self.cap,
        }


def _start_rows(starts: Sequence[int], size: int) -> np.ndarray:
    rows = np.zeros((len(starts), size))
    rows[np.arange(len(starts)), list(starts)] = 1.0
    return rows


def distance_curve(mu: np.ndarray, P: Kernel, starts, t_max: int) -> np.ndarray:
    """``max_{x in starts} ||P^t(x, .) - mu||`` for ``t = 0..t_max``."""
    mu = np.asarray(mu, dtype=float)
    idx = np.flatnonzero(subset_mask(starts, mu.shape[0]))
    rows = _start_rows(idx, mu.shape[0])
    out = np.empty(t_max + 1)
    for t, cur in enumerate(iterate(rows, P, t_max)):
        out[t] = np.max(tv_distance(cur, mu[None, :]))
    return out


def pseudo_mix_time(mu: np.ndarray, P: Kernel, S, epsilon_tv: float, cap: int, mu_id: str = "mu") -> PseudoMixReport:
    """Evolve every start in ``S`` together until all are within budget."""
    mu = np.asarray(mu, dtype=float)
    idx = np.flatnonzero(subset_mask(S, mu.shape[0]))
    if idx.size == 0:
        raise ValueError("start set is empty")
    rows = _start_rows(idx, mu.shape[0])
    curve = []
    found = None
    for t, cur in enumerate(iterate(rows, P, cap)):
        d = float(np.max(tv_distance(cur, mu[None, :])))
        curve.append(d)
        if d <= epsilon_tv:
            found = t
            break
    return PseudoMixReport(mu, tuple(int(i) for i in idx), float(epsilon_tv), found, int(cap), np.array(curve), mu_id)


@dataclass(frozen=True)
class Window:
    """Times ``start..end`` on which every start is within ``budget`` of ``mu``."""

    start: int
    end: int
    budget: float

    def __contains__(self, t: int) -> bool:
        return self.start <= t <= self.end


def extend_window(cert: MetastabilityCertificate, report: PseudoMixReport) -> Window:
    """Combine a certificate and a pseudo-mixing time into a guaranteed window."""
    if not report.found:
        raise ValueError("pseudo-mixing time was not reached within its cap")
    if not cert.valid:
        raise ValueError("certificate does not hold at its own budget")
    if cert.mu.shape != report.mu.shape or not np.array_equal(cert.mu, report.mu):
        raise ValueError("certificate and report concern different distributions")
    if not math.isclose(cert.epsilon_tv, report.epsilon_tv, rel_tol=0, abs_tol=1e-15):
        raise ValueError("certificate and report use different budgets")
    return Window(report.t_found, report.t_found + cert.T, 2 * cert.epsilon_tv)


def verify_window(mu: np.ndarray, P: Kernel, starts, window: Window) -> float:
    """Largest exact distance to ``mu`` over the window (dense check)."""
    curve = distance_curve(mu, P, starts, window.end)
    return float(curve[window.start:].max())


# ---------------------------------------------------------------- transfer bounds

def degenerate_state(mu: np.ndarray) -> Optional[int]:
    mu = np.asarray(mu)
    nz = np.flatnonzero(mu)
    if nz.size == 1 and mu[nz[0]] == 1.0:
        return int(nz[0])
    return None


def tv_bound_via_hitting(cert: MetastabilityCertificate, hit_cdf: np.ndarray) -> np.ndarray:
    """``eps + (1 - eps) * Prob(tau_y > t)`` for ``mu`` concentrated on ``y``.

    ``eps`` is the certificate budget; ``hit_cdf[t] = Prob(tau_y <= t)``.
    The bound holds for ``t <= cert.T``.
    """
    if degenerate_state(cert.mu) is None:
        raise ValueError("the hitting bound needs a distribution concentrated on one state")
    if not cert.valid:
        raise ValueError("certificate does not hold at its own budget")
    cdf = np.asarray(hit_cdf, dtype=float)
    eps = cert.epsilon_tv
    return eps + (1.0 - eps) * (1.0 - cdf)


def tv_bound_via_coupling(cert: MetastabilityCertificate, S, coupling_tail: np.ndarray) -> np.ndarray:
    """``eps + max_{x, y in S} ||P^t(x, .) - P^t(y, .)||`` bounded by a coupling tail.

    ``coupling_tail[t]`` is any upper bound on the pairwise distance at time
    ``t`` (e.g. ``2 * max_z Prob_z(tau_0 > t)`` from the ring coupling).
    """
    mask = subset_mask(S, cert.mu.shape[0])
    outside = cert.mu[~mask]
    if (outside > 0).any():
        raise ValueError("distribution has mass outside the start set")
    tail = np.asarray(coupling_tail, dtype=float)
    if mask.sum() == 1:
        tail = np.zeros_like(tail)
    return cert.epsilon_tv + tail


def pairwise_distance_curve(P: Kernel, S, size: int, t_max: int) -> np.ndarray:
    """Exact ``max_{x, y in S} ||P^t(x, .) - P^t(y, .)||`` for small ``S``."""
    idx = np.flatnonzero(subset_mask(S, size))
    rows = _start_rows(idx, size)
    out = np.empty(t_max + 1)
    for t, cur in enumerate(iterate(rows, P, t_max)):
        diff = 0.5 * np.abs(cur[:, None, :] - cur[None, :, :]).sum(axis=-1)
        out[t] = diff.max()
    return out
