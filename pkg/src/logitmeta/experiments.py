"""Named experiment presets and a config-driven dispatcher.

Every preset writes its CSV files under ``<out>/<preset>/`` and a
``summary.json`` listing each checked assertion with the measured value, the
expected value or bound, the tolerance and the verdict.  Presets are pure
functions of their parameters and seed, so re-running one reproduces the
same bytes.
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np
from scipy.special import expit

from . import bd, io
from .chain import (
    absorbing_hit_probability,
    build_transition_matrix,
    gibbs_distribution,
    hitting_time_cdf,
    logit_kernel,
    logit_operator,
    point_mass,
    restricted_distribution,
    bottleneck_ratio,
    stationary_distribution,
    subset_mask,
    survival_function,
    toy_three_state,
    tv_distance,
    uniform,
)
from .games import (
    GameSpec,
    all_bits,
    ising_game,
    or_game,
    potential_vector,
    ring_game,
    two_player_coordination,
)
from .meta import (
    amplify,
    certify_amplified,
    certify_exact,
    distance_curve,
    extend_window,
    pseudo_mix_time,
    tv_bound_via_coupling,
    tv_bound_via_hitting,
    verify_window,
)
from .projection import BirthDeathChain, constant_rate_chain, ehrenfest, lazy, magnetization_chain, or_projection
from .sim import empirical_tv_bound

OUT_ENV = "LOGITMETA_OUT"
DEFAULT_OUT = "logitmeta-out"
DEFAULT_SEED = 20240601


class ExperimentError(ValueError):
    pass


class HypothesisWarning(UserWarning):
    """Parameters sit outside the regime an asymptotic statement covers."""


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, DEFAULT_OUT))


# ---------------------------------------------------------------- results

RELATIONS = ("eq", "le", "ge", "vacuous")


@dataclass
class Assertion:
    """One checked claim.

    ``eq`` passes when ``|measured - expected| <= tolerance``, ``le`` when
    ``measured <= expected + tolerance`` and ``ge`` when
    ``measured >= expected - tolerance``.  ``vacuous`` marks a statement
    whose range of validity is empty at the chosen parameters.
    """

    id: str
    claim: str
    formula: str
    measured: Optional[float]
    expected: Optional[float]
    tolerance: float = 0.0
    relation: str = "eq"
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        m, e, tol = self.measured, self.expected, self.tolerance
        if self.relation == "vacuous":
            self.passed = True
        elif m is None or e is None or not math.isfinite(m):
            self.passed = False
        elif self.relation == "eq":
            self.passed = abs(m - e) <= tol
        elif self.relation == "le":
            self.passed = m <= e + tol
        else:
            self.passed = m >= e - tol

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "claim": self.claim,
            "formula": self.formula,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "passed": self.passed,
        }


@dataclass
class PresetResult:
    name: str
    params: dict
    seed: int
    assertions: list = field(default_factory=list)
    observations: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def failures(self) -> list:
        return [a for a in self.assertions if not a.passed]

    def to_dict(self) -> dict:
        return {
            "preset": self.name,
            "params": self.params,
            "seed": self.seed,
            "passed": self.passed,
            "assertions": [a.to_dict() for a in self.assertions],
            "observations": self.observations,
            "files": self.files,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


class _Run:
    """Collects assertions, observations and files for one preset."""

    def __init__(self, name: str, params: dict, seed: int, out: Path):
        self.result = PresetResult(name, dict(params), seed)
        self.dir = Path(out) / name
        self.dir.mkdir(parents=True, exist_ok=True)

    def check(self, id, claim, formula, measured, expected, tolerance=0.0, relation="eq") -> Assertion:
        m = None if measured is None else float(measured)
        e = None if expected is None else float(expected)
        a = Assertion(id, claim, formula, m, e, float(tolerance), relation)
        self.result.assertions.append(a)
        return a

    def observe(self, key: str, value) -> None:
        self.result.observations[key] = value

    def _record(self, path: Path) -> None:
        self.result.files.append(path.name)

    def curve(self, name: str, values, column: str, start: int = 0) -> None:
        self._record(io.write_curve(self.dir / name, values, column, start))

    def rows(self, name: str, header, rows) -> None:
        self._record(io.write_rows(self.dir / name, header, rows))

    def finish(self) -> PresetResult:
        path = self.dir / "summary.json"
        path.write_text(self.result.to_json())
        return self.result


def _warn(run: _Run, message: str) -> None:
    warnings.warn(message, HypothesisWarning, stacklevel=3)
    run.result.observations.setdefault("hypothesis_warnings", []).append(message)


def _index(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def _leading_ones(n: int, k: int) -> list:
    return [1] * k + [0] * (n - k)


def _minimal_indices(mask: np.ndarray) -> np.ndarray:
    """States of ``mask`` whose set of 1-bits has no strict superset in ``mask``."""
    idx = np.flatnonzero(mask)
    keep = [x for x in idx if not np.any(((idx & x) == x) & (idx != x))]
    return np.array(keep, dtype=np.int64)


# ---------------------------------------------------------------- presets

def _toy3(run: _Run, p: dict) -> None:
    eps, budget = p["eps"], p["budget"]
    P = toy_three_state(eps)
    pi_formula = np.array([eps, (1 - eps) / 2, (1 - eps) / 2])
    pi = stationary_distribution(P)
    run.check("toy3.stationary", "stationary law of the three-state chain",
              "pi = (eps, (1-eps)/2, (1-eps)/2)", np.abs(pi - pi_formula).max(), 0.0, 1e-12)
    rep = pseudo_mix_time(pi_formula, P, [0], 1e-12, p["cap"], "pi")
    run.check("toy3.one-step", "from the resampling state the chain is stationary after one step",
              "t_pmt({0}, pi, 1e-12) = 1", rep.t_found if rep.found else None, 1)
    run.curve("toy3_pmt_from0.csv", rep.curve, "tv")

    mu1 = point_mass(3, 1)
    amp = certify_amplified(mu1, P, budget, mu_id="state1")
    run.check("toy3.sticky-drift", "one-step drift of a sticky state",
              "||mu1 P - mu1|| = eps", amp.one_step_drift, eps, 1e-12)
    T = int(math.floor(budget / eps))
    cert = certify_exact(mu1, P, budget, T, "state1")
    run.check("toy3.sticky-meta", "sticky states stay close for budget/eps steps",
              "max_{t<=floor(budget/eps)} ||mu1 P^t - mu1|| <= budget", cert.drift_max, budget, 0.0, "le")
    run.curve("toy3_drift_state1.csv", cert.drift_curve, "tv")
    # worst-start mixing time, reported to show it grows like 1/eps
    tmix = None
    curve = distance_curve(pi_formula, P, [0, 1, 2], 50 * int(math.ceil(1 / eps)))
    hits = np.flatnonzero(curve <= 0.25)
    if hits.size:
        tmix = int(hits[0])
    run.observe("t_mix_quarter", tmix)
    run.observe("t_mix_times_eps", None if tmix is None else tmix * eps)


def _coord2(run: _Run, p: dict) -> None:
    beta, a, b, c, d = p["beta"], p["a"], p["b"], p["c"], p["d"]
    g = two_player_coordination(beta, a, b, c, d)
    P = build_transition_matrix(g)
    e = float(expit(-(a - d) * beta))
    dl = float(expit(-(b - c) * beta))
    M = np.array([
        [1 - e, e / 2, e / 2, 0.0],
        [(1 - e) / 2, (e + dl) / 2, 0.0, (1 - dl) / 2],
        [(1 - e) / 2, 0.0, (e + dl) / 2, (1 - dl) / 2],
        [0.0, dl / 2, dl / 2, 1 - dl],
    ])
    run.check("coord2.matrix", "logit kernel of a 2x2 coordination game",
              "rows (1-e, e/2, e/2, 0), ((1-e)/2, (e+d)/2, 0, (1-d)/2), ...", np.abs(P - M).max(), 0.0, 1e-12)
    io.write_matrix(run.dir / "coord2_matrix.csv", P)
    run.result.files.append("coord2_matrix.csv")
    pi = gibbs_distribution(g)
    pi_formula = np.array([dl * (1 - e), e * dl, e * dl, e * (1 - dl)]) / (e + dl)
    run.check("coord2.stationary", "stationary law of the 2x2 coordination game",
              "pi = [d(1-e), e d, e d, e(1-d)] / (e + d)", np.abs(pi - pi_formula).max(), 0.0, 1e-12)

    # equal coordination gains
    bs, gain = p["beta_sym"], p["gain_sym"]
    gs = two_player_coordination(bs, gain, gain, 0.0, 0.0)
    Ps = build_transition_matrix(gs)
    es = float(expit(-gain * bs))
    pis = gibbs_distribution(gs)
    pis_formula = np.array([(1 - es) / 2, es / 2, es / 2, (1 - es) / 2])
    run.check("coord2.sym-stationary", "stationary law with equal gains",
              "pi = ((1-e)/2, e/2, e/2, (1-e)/2)", np.abs(pis - pis_formula).max(), 0.0, 1e-12)
    for name, state in (("00", 0), ("11", 3)):
        mu = point_mass(4, state)
        run.check(f"coord2.drift-{name}", f"one-step drift of the point mass on ({name[0]},{name[1]})",
                  "||mu P - mu|| = e", tv_distance(mu @ Ps, mu), es, 1e-12)
    one = float(max(tv_distance(point_mass(4, s) @ Ps, pis) for s in (1, 2)))
    run.check("coord2.mixed-one-step", "mixed profiles are within e of pi after one step",
              "||(0,1) P - pi|| <= e", one, es, 1e-12, "le")
    run.observe("mixed_one_step_tv", one)
    run.observe("mixed_one_step_tv_over_e", one / es)
    rep = pseudo_mix_time(pis, Ps, [1, 2], es, p["cap"], "pi")
    run.check("coord2.mixed-pmt", "pseudo-mixing time of pi from the mixed profiles",
              "t_pmt({(0,1),(1,0)}, pi, e) = 1", rep.t_found if rep.found else None, 1)
    T = int(math.floor(0.25 / es))
    mu00 = point_mass(4, 0)
    cert = certify_exact(mu00, Ps, 0.25, T, "state00")
    run.check("coord2.quarter-meta", "pure profiles are (1/4, floor(1/(4e)))-metastable",
              "max_{t<=floor(1/(4e))} ||mu00 P^t - mu00|| <= 1/4", cert.drift_max, 0.25, 0.0, "le")
    run.curve("coord2_drift_state00.csv", cert.drift_curve, "tv")
    run.observe("quarter_meta_T", T)


def _or_uniform_meta(run: _Run, p: dict) -> None:
    n, beta, eps = p["n"], p["beta"], p["eps"]
    g = or_game(n, beta)
    P = logit_kernel(g)
    U = uniform(g.num_states)
    d = float(tv_distance(U @ P, U))
    formula = 2.0 ** -n * math.tanh(beta / 2)
    run.check("or.uniform-drift", "one-step drift of the uniform law in the OR game",
              "||U P - U|| = 2^-n (e^beta - 1)/(e^beta + 1)", d, formula, 1e-12)
    T = int(math.floor(eps * 2 ** n))
    run.check("or.uniform-amplified", "uniform law is (eps, eps 2^n)-metastable by amplification",
              "drift * floor(eps 2^n) <= eps", amplify(d, T), eps, 0.0, "le")
    cert = certify_exact(U, P, eps, T, "uniform")
    run.check("or.uniform-exact", "exact drift curve stays within eps up to eps 2^n",
              "max_{t<=T} ||U P^t - U|| <= eps", cert.drift_max, eps, 0.0, "le")
    excess = float(np.max(cert.drift_curve - d * np.arange(T + 1)))
    run.check("or.uniform-subadditive", "exact drift never exceeds the amplified line",
              "||U P^t - U|| <= t ||U P - U||", excess, 0.0, 1e-15, "le")
    run.curve("or_uniform_drift.csv", cert.drift_curve, "tv")
    run.observe("one_step_drift", d)


def _or_pseudo_mix(run: _Run, p: dict) -> None:
    n, eps = p["n"], p["eps"]
    t_lo = int(math.ceil(n * math.log(3 * n / eps)))
    t_hi = int(math.floor(eps * 2 ** (n - 1)))
    run.observe("window", [t_lo, t_hi])
    if t_lo > t_hi:
        _warn(run, f"n ln(3n/eps) = {t_lo} exceeds eps 2^(n-1) = {t_hi}: the guaranteed window is empty at n={n}")
    for beta in p["betas"]:
        g = or_game(n, beta)
        P = logit_kernel(g)
        U = uniform(g.num_states)
        amp = certify_amplified(U, P, eps, mu_id="uniform")
        run.observe(f"beta={beta:g}.amplified_T", amp.T)
        for k in p["weights"]:
            tag = f"beta={beta:g},k={k}"
            x = _index(_leading_ones(n, k))
            rep = pseudo_mix_time(U, P, [x], eps, p["cap"], "uniform")
            horizon = max(t_hi, (rep.t_found + amp.T) if rep.found else 0, len(rep.curve) - 1)
            curve = distance_curve(U, P, [x], horizon)
            run.curve(f"or_pmt_beta{beta:g}_k{k}.csv", curve, "tv")
            if t_lo > t_hi:
                run.check(f"or.window[{tag}]", "start with k >= 1 ones is eps-close to uniform on the window",
                          "||P^t(x,.) - U|| <= eps for n ln(3n/eps) <= t <= eps 2^(n-1)", None, eps, 0.0, "vacuous")
            else:
                run.check(f"or.window[{tag}]", "start with k >= 1 ones is eps-close to uniform on the window",
                          "||P^t(x,.) - U|| <= eps for n ln(3n/eps) <= t <= eps 2^(n-1)",
                          curve[t_lo:t_hi + 1].max(), eps, 0.0, "le")
            if rep.found:
                w = extend_window(amp, rep)
                worst = verify_window(U, P, [x], w)
                run.check(f"or.extended[{tag}]", "pseudo-mixing time plus amplified certificate gives a window",
                          "||P^t(x,.) - U|| <= 2 eps for t_pmt <= t <= t_pmt + T", worst, w.budget, 0.0, "le")
                run.observe(f"{tag}.pmt", rep.t_found)
                run.observe(f"{tag}.extended_window", [w.start, w.end])
            else:
                run.observe(f"{tag}.pmt", None)
                run.observe(f"{tag}.min_tv", float(np.min(curve)))
                _warn(run, f"{tag}: distance to uniform never drops to {eps:g} within {p['cap']} steps")


def _ising_pi_meta(run: _Run, p: dict) -> None:
    n, c, beta = p["n"], p["c"], p["beta"]
    if not beta > c * math.log(n) / n:
        _warn(run, f"beta={beta:g} does not exceed c ln(n)/n = {c * math.log(n) / n:.4g}")
    g = ising_game(n, beta)
    P = logit_kernel(g)
    N = g.num_states
    plus, minus = point_mass(N, N - 1), point_mass(N, 0)
    d = float(tv_distance(plus @ P, plus))
    exact = float(expit(-2 * beta * (n - 1)))
    stated = float(expit(-beta * (n - 2)))
    run.check("ising.plus-drift", "one-step drift of the all-plus point mass",
              "||pi+ P - pi+|| = 1/(1+e^{2 beta (n-1)})", d, exact, 1e-12)
    # mass that leaves all-plus, summed from the off-diagonal entries so the
    # tiny drift is not lost to cancellation in 1 - P(stay)
    escaped = float((plus @ P)[:-1].sum())
    run.check("ising.plus-drift-relative", "escaped mass relative to the closed form",
              "sum_{y != +} P(+, y) (1+e^{2 beta (n-1)}) = 1", escaped / exact, 1.0, 1e-9)
    run.check("ising.plus-drift-bound", "drift is below the weaker one-spin bound",
              "||pi+ P - pi+|| <= 1/(1+e^{beta (n-2)})", d, stated, 0.0, "le")
    run.check("ising.minus-symmetric", "all-minus has the same drift",
              "||pi- P - pi-|| = ||pi+ P - pi+||", float((minus @ P)[1:].sum()) / escaped, 1.0, 1e-12)
    run.observe("drift_exact_form", exact)
    run.observe("drift_one_spin_form", stated)
    T = int(round(n ** (c - 2)))
    run.check("ising.plus-amplified", "pi+ is (1/n, n^{c-2})-metastable",
              "drift * n^{c-2} <= 1/n", amplify(d, T), 1.0 / n, 0.0, "le")
    horizon = min(T, p["exact_horizon"])
    cert = certify_exact(plus, logit_operator(g), 1.0 / n, horizon, "plus")
    run.check("ising.plus-exact", "exact drift curve up to the checked horizon",
              "max_{t<=H} ||pi+ P^t - pi+|| <= 1/n", cert.drift_max, 1.0 / n, 0.0, "le")
    run.curve("ising_plus_drift.csv", cert.drift_curve, "tv")


def _ising_convergence(run: _Run, p: dict) -> None:
    n, beta, k = p["n"], p["beta"], p["magnetization"]
    t_lo, t_hi, limit, eps = p["t_lo"], p["t_hi"], p["bound"], p["eps"]
    if (n + k) % 2 or not 0 < k <= n:
        raise ExperimentError(f"magnetization {k} is not reachable with n={n} spins")
    c = beta * n / math.log(n)
    if not k * k > c * math.log(n) / beta:
        _warn(run, f"k^2 = {k * k} does not exceed c ln(n)/beta at c = {c:.4g}")
    if t_lo < n ** 4 or t_hi > n ** (c - 2):
        _warn(run, f"t-range [{t_lo}, {t_hi}] leaves [n^4, n^(c-2)] = [{n ** 4}, {n ** (c - 2):.4g}] at c = {c:.4g}")
    run.observe("largest_c", c)
    g = ising_game(n, beta)
    N = g.num_states
    ones = (n + k) // 2
    x = _index([0] * (n - ones) + [1] * ones)
    op = logit_operator(g)
    cdf = hitting_time_cdf(op, [N - 1], x, t_hi)
    run.curve("ising_hit_cdf.csv", cdf, "prob")
    chain = magnetization_chain(n, beta)
    cdf1 = bd.hit_cdf_1d(chain, [n], ones, t_hi)
    run.check("ising.lumped-cdf", "full chain and magnetisation chain give the same hitting law",
              "max_t |P_x(tau+ <= t) - P_k(tau_n <= t)| = 0", np.abs(cdf - cdf1).max(), 0.0, 1e-12)

    plus = point_mass(N, N - 1)
    cert = certify_exact(plus, op, eps, t_hi, "plus")
    run.check("ising.cert", "pi+ stays eps-close over the whole range",
              "max_{t<=t_hi} ||pi+ P^t - pi+|| <= eps", cert.drift_max, eps, 0.0, "le")
    bound = tv_bound_via_hitting(cert, cdf)
    run.curve("ising_tv_bound.csv", bound[t_lo:], "tv", start=t_lo)
    run.check("ising.bound", "hitting bound on the distance to pi+ over the range",
              "max_{t_lo<=t<=t_hi} eps + (1-eps) P_x(tau+ > t) <= bound", bound[t_lo:].max(), limit, 0.0, "le")

    lo = n // 2
    p_low, _ = bd.exit_probabilities(chain, ones, lo, n)
    e_exit = bd.exit_time_expectation(chain, ones, lo, n)
    tail = 1.0 - cdf[t_lo]
    run.check("ising.markov-split", "tail of tau+ is split into slow exit and wrong-side exit",
              "P_x(tau+ > t) <= E[tau_{0,n}]/t + P(exit at S <= 0)", tail, e_exit / t_lo + p_low, 1e-15, "le")
    run.observe("exit_low_probability", p_low)
    run.observe("expected_exit_time", e_exit)

    Pd = build_transition_matrix(g)
    for t in p["spot"]:
        if not 0 <= t <= t_hi:
            continue
        row = np.linalg.matrix_power(Pd, int(t))[x]
        tv = float(tv_distance(row, plus))
        run.check(f"ising.spot[t={t}]", "dense matrix power agrees with the bound",
                  "||P^t(x,.) - pi+|| <= hitting bound", tv, bound[t], 1e-12, "le")
        run.observe(f"spot_tv[t={t}]", tv)


def _ring(p: dict, beta=None) -> GameSpec:
    return ring_game(p["n"], p["beta"] if beta is None else beta, p["a"], p["b"], p["c"], p["d"])


def _ring_bottlenecks(run: _Run, p: dict, seed: int) -> None:
    g = _ring(p)
    N = g.num_states
    P = build_transition_matrix(g)
    pi = gibbs_distribution(g)
    D, dl, beta = g.big_delta, g.small_delta, g.beta
    for name, state, gain, sym in (("ones", N - 1, dl, "delta"), ("zeros", 0, D, "Delta")):
        bn = bottleneck_ratio(P, pi, [state])
        run.check(f"ring.bn-{name}", f"bottleneck ratio of the all-{name} profile",
                  f"Bn = 1/(1+e^(2 {sym} beta))", bn, expit(-2 * gain * beta), 1e-12)
        run.check(f"ring.bn-{name}-bound", "below the exponential form",
                  f"Bn <= e^(-2 {sym} beta)", bn, math.exp(-2 * gain * beta), 0.0, "le")
        run.observe(f"bn_{name}_gap_to_exponential", math.exp(-2 * gain * beta) - bn)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(p["subsets"]):
        mask = rng.random(N) < rng.uniform(0.05, 0.95)
        if not mask.any():
            mask[rng.integers(N)] = True
        piS = restricted_distribution(pi, mask)
        worst = max(worst, abs(float(tv_distance(piS @ P, piS)) - bottleneck_ratio(P, pi, mask)))
    run.check("ring.bn-identity", "restricted Gibbs law drifts by exactly its bottleneck ratio",
              "| ||pi_S P - pi_S|| - Bn(S) | = 0", worst, 0.0, 1e-12)

    dz = p["zeros"]
    star = subset_mask("R", N) | subset_mask(f"zeros>={dz}", N)
    bn_star = bottleneck_ratio(P, pi, star)
    n = g.n
    run.check("ring.bn-star", "bottleneck ratio of R plus profiles with many zeros",
              "Bn(S*_d) <= n^(d+1) e^(-(n-d-1)(Delta-delta) beta)",
              bn_star, n ** (dz + 1) * math.exp(-(n - dz - 1) * (D - dl) * beta), 0.0, "le")

    eps, bm = p["eps"], p["beta_meta"]
    gm = _ring(p, bm)
    Pm = build_transition_matrix(gm)
    for name, state, gain in (("ones", N - 1, dl), ("zeros", 0, D)):
        T = int(math.floor(eps * math.exp(2 * gain * bm)))
        mu = point_mass(N, state)
        amp = certify_amplified(mu, Pm, eps, T, name)
        run.check(f"ring.meta-{name}", f"all-{name} is (eps, eps e^(2 gain beta))-metastable",
                  "drift * floor(eps e^(2 gain beta)) <= eps", amp.drift_max, eps, 0.0, "le")
        H = min(T, p["exact_cap"])
        cert = certify_exact(mu, Pm, eps, H, name)
        run.check(f"ring.meta-{name}-exact", "exact drift curve on the checked horizon",
                  "max_{t<=H} ||mu P^t - mu|| <= eps", cert.drift_max, eps, 0.0, "le")
        run.curve(f"ring_drift_{name}.csv", cert.drift_curve, "tv")


def _ring_pseudo(run: _Run, p: dict, seed: int) -> None:
    g = _ring(p)
    n, N, beta = g.n, g.num_states, g.beta
    if beta < math.log(n):
        _warn(run, f"beta={beta:g} is below ln n = {math.log(n):.4g}; the statements assume beta >> ln n")
    dz, lam, gamma0 = p["zeros"], p["lam"], p["gamma"]
    P = build_transition_matrix(g)
    pi = gibbs_distribution(g)
    R = subset_mask("R", N)
    star = R | subset_mask(f"zeros>={dz}", N)
    pi_d = restricted_distribution(pi, star)
    t_star = int(math.ceil(8 * n * n / lam))

    amp = certify_amplified(pi_d, P, lam / 2, t_star, "pi_star")
    run.check("ring.star-meta", "pi restricted to S*_d is (lambda/2, 8n^2/lambda)-metastable",
              "drift * 8n^2/lambda <= lambda/2", amp.drift_max, lam / 2, 0.0, "le")

    minimal = _minimal_indices(star)
    surv = survival_function(P, "all-zeros", t_star, minimal)
    tail = surv.max(axis=1)
    run.curve("ring_tail_star.csv", tail, "prob")

    t_R = int(math.ceil((8 - lam) * n * n / lam))
    min_R = _minimal_indices(R)
    tail_R = survival_function(P, "all-zeros", t_R, min_R)[-1].max()
    run.check("ring.tail-R", "from R the all-zeros profile is hit quickly",
              "max_{x in R} P_x(tau_0 > (8-lambda) n^2/lambda) <= lambda/4", tail_R, lam / 4, 0.0, "le")
    run.check("ring.tail-star", "from S*_d the all-zeros profile is hit quickly",
              "max_{x in S*_d} P_x(tau_0 > 8n^2/lambda) <= 1/(2d+1) + lambda/4",
              tail[-1], 1 / (2 * dz + 1) + lam / 4, 0.0, "le")

    bound = tv_bound_via_coupling(amp, star, 2 * tail)
    run.curve("ring_coupling_bound.csv", bound, "tv")
    gamma = 2 / (2 * dz + 1) + lam
    Pt = np.linalg.matrix_power(P, t_star)
    exact = float(tv_distance(Pt[star], pi_d[None, :]).max())
    run.check("ring.pmt-star", "pseudo-mixing of pi_d from S*_d by 8n^2/lambda",
              "max_{x in S*_d} ||P^t(x,.) - pi_d|| <= 2/(2d+1) + lambda", exact, gamma, 0.0, "le")
    run.check("ring.pmt-star-coupling", "the coupling bound dominates the exact distance",
              "exact <= lambda/2 + 2 max_z P_z(tau_0 > t)", exact, bound[-1], 1e-12, "le")
    run.observe("pmt_star_exact", exact)

    profiles = [all_bits(n)[z] for z in minimal]
    est = empirical_tv_bound(g, profiles, t_star, p["replicas"], seed=seed, threads=p["threads"])
    run.check("ring.mc-coupling", "Monte Carlo coupling bound covers the exact tail",
              "2 max_z P_z(tau_0 > t) <= upper confidence bound", 2 * tail[-1], est.upper, 0.0, "le")
    run.observe("mc_point", est.point)
    run.observe("mc_upper", est.upper)
    run.observe("mc_method", est.method)

    t0 = int(math.ceil(8 * n * n / gamma0))
    zeros_pt = point_mass(N, 0)
    amp0 = certify_amplified(zeros_pt, P, gamma0 / 2, t0, "zeros")
    tail0 = survival_function(P, "all-zeros", t0, star)[-1].max()
    hit_bound = gamma0 / 2 + (1 - gamma0 / 2) * tail0
    exact0 = float(tv_distance(np.linalg.matrix_power(P, t0)[star], zeros_pt[None, :]).max())
    run.check("ring.zeros-cert", "all-zeros is (gamma/2, 8n^2/gamma)-metastable",
              "drift * 8n^2/gamma <= gamma/2", amp0.drift_max, gamma0 / 2, 0.0, "le")
    run.check("ring.pmt-zeros-hitting", "hitting bound dominates the exact distance to all-zeros",
              "exact <= gamma/2 + (1 - gamma/2) max_x P_x(tau_0 > t)", exact0, hit_bound, 1e-12, "le")
    run.check("ring.pmt-zeros", "from S*_d the chain is gamma-close to all-zeros by 8n^2/gamma",
              "max_{x in S*_d} ||P^t(x,.) - delta_0|| <= gamma", exact0, gamma0, 0.0, "le")

    bits = all_bits(n)
    zeros = n - bits.sum(axis=1)
    hitR = 1 - survival_function(P, R, n * n)[-1]
    cand = (zeros == dz) & ~R
    if cand.any():
        run.check("ring.hit-R", "profiles with d scattered zeros reach R within n^2 steps",
                  "min_{x in S_d} P_x(tau_R <= n^2) >= 2d/(2d+1) (1 - negl)",
                  hitR[cand].min(), 2 * dz / (2 * dz + 1), p["negl"], "ge")
    target = star.copy()
    target[N - 1] = True
    hit_med = 1 - survival_function(P, target, n * n)[-1]
    for z in range(1, dz):
        m = (zeros == z) & ~target
        if not m.any():
            continue
        lower = 2 * z / (2 * z + 1) + 3.0 ** -z
        run.check(f"ring.medium[z={z}]", "few zeros: reach S*_d or all-ones within n^2 steps",
                  "min_{x in S_z} P_x(tau <= n^2) >= (2z/(2z+1) + 3^-z)(1 - negl)",
                  hit_med[m].min(), min(lower, 1.0), p["negl"], "ge")


def _ring_nodom(run: _Run, p: dict) -> None:
    g = _ring(p)
    if g.big_delta != g.small_delta:
        raise ExperimentError("ring-nodom needs a - d == b - c")
    n, N, beta, D = g.n, g.num_states, g.beta, g.big_delta
    tol = p["tolerance"]
    worst_pot = 0.0
    for m in range(2, p["n_max"] + 1):
        gm = ring_game(m, beta, g.a, g.b, g.c, g.d)
        bits = all_bits(m).astype(bool)
        zero = ~bits
        level = (zero & np.roll(bits, 1, axis=1)).sum(axis=1)
        phi = potential_vector(gm, bits.astype(np.uint8))
        worst_pot = max(worst_pot, float(np.abs(phi - (m - 2 * level) * D).max()))
    run.check("ring.level-potential", "potential depends on the number of zero blocks only",
              "Phi(x) = (n - 2 l(x)) Delta", worst_pot, 0.0, 1e-12)

    P = build_transition_matrix(g)
    drift = expit(-2 * D * beta)
    worst = 0.0
    for d in range(n + 1):
        mu = d / n * point_mass(N, 0) + (1 - d / n) * point_mass(N, N - 1)
        worst = max(worst, abs(float(tv_distance(mu @ P, mu)) - drift))
    run.check("ring.mix-drift", "every mixture of the two consensus profiles drifts equally",
              "||mu_d P - mu_d|| = 1/(1+e^(2 Delta beta))", worst, 0.0, 1e-14)

    bits = all_bits(n)
    zeros = n - bits.sum(axis=1)
    rows = []
    dev = 0.0
    for x in range(1, N - 1):
        px = absorbing_hit_probability(P, "all-zeros", "all-ones", x)
        rows.append((x, int(zeros[x]), px, zeros[x] / n, abs(px - zeros[x] / n)))
        dev = max(dev, abs(px - zeros[x] / n))
    run.rows("ring_nodom_px.csv", ["state", "zeros", "px", "target", "absdiff"], rows)
    run.check("ring.consensus-split", "consensus is reached on zeros with probability d/n",
              "|P_x(tau_0 < tau_1) - d/n| <= tol", dev, 0.0, tol)

    t = n ** 5
    hit = 1 - survival_function(P, [0, N - 1], t)[-1]
    run.check("ring.consensus-time", "consensus is reached within n^5 steps",
              "min_x P_x(tau_{0,1} <= n^5) >= 1 - tol", hit.min(), 1.0, tol, "ge")
    Pt = np.linalg.matrix_power(P, t)
    far = 0.0
    for d in range(n + 1):
        mu = d / n * point_mass(N, 0) + (1 - d / n) * point_mass(N, N - 1)
        far = max(far, float(tv_distance(Pt[zeros == d], mu[None, :]).max()))
    run.check("ring.mix-pmt", "from S_d the chain is close to mu_d after n^5 steps",
              "max_d max_{x in S_d} ||P^{n^5}(x,.) - mu_d|| <= tol", far, 0.0, tol)


def _bd_suite(run: _Run, p: dict, seed: int) -> None:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for _ in range(p["instances"]):
        n = int(rng.integers(2, p["n_max"] + 1))
        h = int(rng.integers(0, n + 1))
        eps = float(rng.uniform(0.01, 0.99))
        delta = float(rng.uniform(0.01, 1.0 - eps))
        closed = bd.ruin_probability_constant_rates(n, h, eps, delta)
        oracle = bd.ruin_probability(constant_rate_chain(n, eps, delta), h)
        rows.append((n, h, eps, delta, closed, oracle, abs(closed - oracle)))
        worst = max(worst, abs(closed - oracle))
    run.rows("ruin_table.csv", ["n", "h", "eps", "delta", "closed", "oracle", "absdiff"], rows)
    run.check("bd.closed-form", "constant-rate ruin formula against the tridiagonal solve",
              "(1 - (delta/eps)^h) / (1 - (delta/eps)^n)", worst, 0.0, 1e-10)

    excess = -np.inf
    for _ in range(p["instances"]):
        n = int(rng.integers(2, 61))
        alpha = float(rng.uniform(0.05, 0.95))
        up = rng.uniform(0.05, 0.5, n + 1)
        down = up * alpha * rng.uniform(0.0, 1.0, n + 1)
        up[-1] = 0.0
        down[0] = 0.0
        chain = BirthDeathChain(up, down)
        h = int(rng.integers(0, n + 1))
        low, _ = bd.exit_probabilities(chain, h) if 0 < h < n else ((1.0, 0.0) if h == 0 else (0.0, 1.0))
        excess = max(excess, low - bd.ruin_bound_geometric(chain, h, alpha))
    run.check("bd.geometric", "exit-at-0 probability is below alpha^h when q/p <= alpha",
              "P_h(exit at 0) <= alpha^h", excess, 0.0, 1e-14, "le")

    n = p["lazy_n"]
    base = ehrenfest(n)
    slow = lazy(base)
    inv = max(abs(bd.ruin_probability(base, h) - bd.ruin_probability(slow, h)) for h in range(n + 1))
    run.check("bd.lazy-exit", "laziness leaves exit locations unchanged",
              "P_h(exit at n) equal for P and (P+I)/2", inv, 0.0, 1e-12)
    t = int(math.ceil(n * math.log(n) + 2 * n))
    dom = -np.inf
    at_t = []
    for k in (1, 2, 3):
        fast = bd.hit_cdf_1d(base, [0], k, t)
        lz = bd.hit_cdf_1d(slow, [0], k, t)
        dom = max(dom, float(np.max(lz - fast)))
        at_t.append(float(fast[t - 1]))
        run.curve(f"ehrenfest_cdf_k{k}.csv", fast, "prob")
    run.check("bd.lazy-cdf", "lazy hitting CDF is dominated by the original one",
              "P_b(lazy tau <= t) <= P_b(tau <= t)", dom, 0.0, 1e-15, "le")
    run.check("bd.ehrenfest-order", "hitting 0 early gets less likely as the start moves up",
              "P_1(tau_0 < t) >= P_2(tau_0 < t) >= P_3(tau_0 < t)",
              max(at_t[1] - at_t[0], at_t[2] - at_t[1]), 0.0, 0.0, "le")
    run.observe("ehrenfest_hit_before_t", at_t)

    ratio = 0.0
    for m in range(2, p["mag_n_max"] + 1):
        for beta in p["mag_betas"]:
            chain = magnetization_chain(m, beta)
            lo = m // 2
            for h in range(lo + 1, m):
                ratio = max(ratio, bd.exit_time_expectation(chain, h, lo, m) / m ** 3)
    run.check("bd.exit-time", "magnetisation chain leaves (0, n) within n^3 steps on average",
              "E_k[tau_{0,n}] <= n^3", ratio, 1.0, 0.0, "le")

    m, beta, k = p["half_n"], p["half_beta"], p["half_start"]
    if not (beta >= 6 / m and beta * k * k >= 16 * math.log(m) and 4 <= k <= m / 2):
        _warn(run, f"half-interval check at n={m}, beta={beta:g}, k={k} is outside its stated regime")
    chain = magnetization_chain(m, beta)
    lo, hi = chain.index_of(0), chain.index_of(m // 2)
    low, _ = bd.exit_probabilities(chain, chain.index_of(k), lo, hi)
    run.check("bd.half-interval", "strong initial magnetisation rarely collapses before n/2",
              "P_k(exit (0, n/2) at <= 0) <= 1/n", low, 1.0 / m, 0.0, "le")
    run.check("bd.half-interval-exp", "same, against the exponential form",
              "P_k(exit (0, n/2) at <= 0) <= e^(-beta k^2/16)", low, math.exp(-beta * k * k / 16), 0.0, "le")
    beta_f = p["full_beta"]
    if beta_f < 8 * math.log(m) / m:
        _warn(run, f"beta={beta_f:g} is below 8 ln(n)/n at n={m}")
    chain = magnetization_chain(m, beta_f)
    low, _ = bd.exit_probabilities(chain, chain.index_of(m // 2), chain.index_of(0), m)
    run.check("bd.full-interval", "from n/2 the chain reaches n before collapsing",
              "P_{n/2}(exit (0, n) at <= 0) <= (2/n)^(n/8)", low, (2 / m) ** (m / 8), 0.0, "le")


# ---------------------------------------------------------------- registry

@dataclass(frozen=True)
class Preset:
    name: str
    func: Callable
    defaults: dict
    summary: str
    seeded: bool = False


PRESETS = {
    p.name: p
    for p in (
        Preset("toy3", _toy3, {"eps": 0.01, "budget": 0.25, "cap": 20},
               "three-state chain: stationary law, one-step pseudo-mixing, sticky states"),
        Preset("coord2", _coord2,
               {"beta": 1.0, "a": 3.0, "b": 1.0, "c": 0.0, "d": 0.0, "beta_sym": 3.0, "gain_sym": 2.0, "cap": 10},
               "2x2 coordination game: kernel, stationary law, quarter-budget metastability"),
        Preset("or-uniform-meta", _or_uniform_meta, {"n": 8, "beta": 5.0, "eps": 0.1},
               "OR game: drift of the uniform law and its amplified certificate"),
        Preset("or-pseudo-mix", _or_pseudo_mix,
               {"n": 10, "betas": [10.0, 20.0], "eps": 0.1, "weights": [1, 5, 10], "cap": 200},
               "OR game: distance to uniform from fixed starts, guaranteed windows"),
        Preset("ising-pi-meta", _ising_pi_meta, {"n": 10, "c": 7.0, "beta": 1.7, "exact_horizon": 1000},
               "Ising game: drift and certificate of the all-plus point mass"),
        Preset("ising-convergence", _ising_convergence,
               {"n": 10, "beta": 1.5, "magnetization": 8, "t_lo": 1000, "t_hi": 100000, "bound": 0.3,
                "eps": 0.1, "spot": [1000, 10000, 100000]},
               "Ising game: distance to all-plus from a strongly magnetised start"),
        Preset("ring-bottlenecks", _ring_bottlenecks,
               {"n": 5, "a": 2.0, "b": 1.0, "c": 0.0, "d": 0.0, "beta": 1.0, "subsets": 100, "zeros": 2,
                "eps": 0.1, "beta_meta": 4.0, "exact_cap": 20000},
               "ring game: bottleneck ratios and metastable consensus profiles", seeded=True),
        Preset("ring-pseudo", _ring_pseudo,
               {"n": 10, "a": 2.0, "b": 1.0, "c": 0.0, "d": 0.0, "beta": 6.0, "zeros": 3, "lam": 0.5,
                "gamma": 0.5, "replicas": 2000, "threads": 1, "negl": 1e-6},
               "ring game with a risk dominant strategy: pseudo-mixing from S*_d", seeded=True),
        Preset("ring-nodom", _ring_nodom,
               {"n": 8, "a": 1.0, "b": 1.0, "c": 0.0, "d": 0.0, "beta": 10.0, "tolerance": 0.05, "n_max": 12},
               "ring game with equal gains: level potential, consensus split, mixtures"),
        Preset("bd-suite", _bd_suite,
               {"instances": 500, "n_max": 200, "lazy_n": 64, "mag_n_max": 20, "mag_betas": [0.5, 1.0, 2.0],
                "half_n": 20, "half_beta": 1.0, "half_start": 8, "full_beta": 1.5},
               "birth-and-death chains: ruin formula, comparison bounds, exit times", seeded=True),
    )
}


def _coerce(name: str, key: str, default, value):
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes"):
                    return True
                if value.lower() in ("0", "false", "no"):
                    return False
                raise ValueError(value)
            return bool(value)
        if isinstance(default, int):
            v = float(value)
            if v != int(v):
                raise ValueError(value)
            return int(v)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, list):
            items = value.split(",") if isinstance(value, str) else list(value)
            return [_coerce(name, key, default[0], v) for v in items] if default else items
    except (TypeError, ValueError):
        raise ExperimentError(f"{name}: parameter {key!r} expects {type(default).__name__}, got {value!r}") from None
    return value


def resolve_params(name: str, overrides: Optional[dict] = None) -> dict:
    if name not in PRESETS:
        raise ExperimentError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    preset = PRESETS[name]
    params = dict(preset.defaults)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ExperimentError(f"{name}: unknown parameter {key!r}; known: {', '.join(sorted(params))}")
        params[key] = _coerce(name, key, params[key], value)
    return params


def run_preset(name: str, overrides: Optional[dict] = None, out_dir=None, seed: Optional[int] = None) -> PresetResult:
    """Run a named preset and write its CSVs and ``summary.json``."""
    params = resolve_params(name, overrides)
    seed = DEFAULT_SEED if seed is None else int(seed)
    run = _Run(name, params, seed, Path(out_dir) if out_dir is not None else default_out_dir())
    preset = PRESETS[name]
    try:
        if preset.seeded:
            preset.func(run, params, seed)
        else:
            preset.func(run, params)
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, ExperimentError):
            raise
        raise ExperimentError(f"{name}: {exc}") from exc
    return run.finish()


# ---------------------------------------------------------------- generic configs

GENERIC_OPS = (
    "gibbs", "matrix", "drift", "bottleneck", "hit-prob", "exit-time", "hit-cdf",
    "simulate", "trajectories", "meta.certify", "meta.pmt",
    "bd.ruin", "bd.exit-time", "bd.cdf", "bd.rates",
)

_number = {"type": "number"}
_subset = {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "integer", "minimum": 0}}]}
_state = {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "array", "items": {"type": "integer"}}]}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["op"],
    "additionalProperties": False,
    "properties": {
        "op": {"enum": list(GENERIC_OPS)},
        "game": {"enum": ["or", "ising", "ring"]},
        "preset": {"enum": ["ehrenfest", "lazy-ehrenfest", "or-projection", "magnetization", "constant"]},
        "n": {"type": "integer", "minimum": 1},
        "beta": {"type": "number", "minimum": 0},
        "a": _number, "b": _number, "c": _number, "d": _number,
        "up": {"type": "number", "minimum": 0, "maximum": 1},
        "down": {"type": "number", "minimum": 0, "maximum": 1},
        "start": _state,
        "lo": {"type": "integer"},
        "hi": {"type": "integer"},
        "target": _subset,
        "avoid": _subset,
        "subset": _subset,
        "mu": _subset,
        "steps": {"type": "number", "minimum": 1},
        "t_max": {"type": "number", "minimum": 0},
        "horizon": {"type": "number", "minimum": 0},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "replicas": {"type": "integer", "minimum": 1},
        "record_every": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "mode": {"enum": ["exact", "amplified"]},
        "out": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"op": {"pattern": "^bd\\."}}}, "then": {"required": ["preset", "n"]},
         "else": {"required": ["game", "n"]}},
    ],
}

RING_DEFAULT_PAYOFFS = (2.0, 1.0, 0.0, 0.0)


@dataclass
class GenericResult:
    op: str
    value: Any
    files: list


def _schema_error_path(err) -> str:
    path = "$"
    for part in err.absolute_path:
        path += f"[{part}]" if isinstance(part, int) else f".{part}"
    return path


def validate_config(config: dict) -> None:
    import jsonschema

    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = [f"{_schema_error_path(e)}: {e.message}" for e in errors]
        raise ExperimentError("invalid config: " + "; ".join(msgs))


def _game_from(cfg: dict) -> GameSpec:
    fam, n, beta = cfg["game"], cfg["n"], cfg.get("beta", 0.0)
    if fam == "or":
        return or_game(n, beta)
    if fam == "ising":
        return ising_game(n, beta)
    a, b, c, d = (cfg.get(k, v) for k, v in zip("abcd", RING_DEFAULT_PAYOFFS))
    return ring_game(n, beta, a, b, c, d)


def _chain_from(cfg: dict):
    name, n, beta = cfg["preset"], cfg["n"], cfg.get("beta", 0.0)
    if name == "ehrenfest":
        return ehrenfest(n)
    if name == "lazy-ehrenfest":
        return lazy(ehrenfest(n))
    if name == "or-projection":
        return or_projection(n, beta)
    if name == "magnetization":
        return magnetization_chain(n, beta)
    return constant_rate_chain(n, cfg.get("up", 0.5), cfg.get("down", 0.5))


def _state_index(game: GameSpec, start) -> int:
    if isinstance(start, int):
        if not 0 <= start < game.num_states:
            raise ExperimentError(f"$.start: state {start} out of range for n={game.n}")
        return start
    from .games import profile_index

    return profile_index(game, start)


def _profile(game: GameSpec, start):
    from .games import index_profile

    return index_profile(game, start) if isinstance(start, int) else start


def _distribution(game: GameSpec, spec, P=None) -> np.ndarray:
    N = game.num_states
    if spec in (None, "pi", "gibbs"):
        return gibbs_distribution(game)
    if spec == "uniform":
        return uniform(N)
    return restricted_distribution(gibbs_distribution(game), spec)


def run_generic(config: dict, out_dir=None) -> GenericResult:
    """Dispatch one operation described by a JSON-style config.

    Integers written as floats (``1e6``) are accepted for step counts.
    Results go to ``<out>/<op>.csv`` (plus ``result.json``).
    """
    validate_config(config)
    cfg = dict(config)
    out = Path(cfg.get("out") or out_dir or default_out_dir())
    out.mkdir(parents=True, exist_ok=True)
    op = cfg["op"]
    files: list = []
    stem = op.replace(".", "_")

    def emit(path: Path) -> None:
        files.append(str(path))

    try:
        if op.startswith("bd."):
            value = _run_bd(op, cfg, out / f"{stem}.csv", emit)
        else:
            value = _run_game_op(op, cfg, out / f"{stem}.csv", emit)
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, ExperimentError):
            raise
        raise ExperimentError(f"{op}: {exc}") from exc
    result = GenericResult(op, value, files)
    (out / "result.json").write_text(
        json.dumps(_jsonable({"op": op, "config": config, "value": value, "files": [Path(f).name for f in files]}),
                   indent=2, sort_keys=True) + "\n"
    )
    return result


def _run_bd(op: str, cfg: dict, path: Path, emit):
    chain = _chain_from(cfg)
    start = cfg.get("start")
    h = None if start is None else chain.index_of(start) if not isinstance(start, list) else None
    lo = chain.index_of(cfg["lo"]) if "lo" in cfg else 0
    hi = chain.index_of(cfg["hi"]) if "hi" in cfg else chain.n
    if op == "bd.rates":
        path.write_text(chain.to_csv())
        emit(path)
        return {"n": chain.n}
    if h is None:
        raise ExperimentError(f"$.start: {op} needs a start state")
    if op == "bd.ruin":
        value = bd.ruin_probability(chain, h, lo, hi)
        io.write_rows(path, ["start", "lo", "hi", "prob"], [(h, lo, hi, value)])
    elif op == "bd.exit-time":
        value = bd.exit_time_expectation(chain, h, lo, hi)
        io.write_rows(path, ["start", "lo", "hi", "time"], [(h, lo, hi, value)])
    else:
        target = cfg.get("target", [lo, hi])
        tgt = [chain.index_of(t) for t in target] if isinstance(target, list) else [lo, hi]
        cdf = bd.hit_cdf_1d(chain, tgt, h, int(cfg.get("t_max", 100)))
        io.write_curve(path, cdf, "prob")
        value = float(cdf[-1])
    emit(path)
    return value


def _run_game_op(op: str, cfg: dict, path: Path, emit):
    game = _game_from(cfg)
    N = game.num_states
    if op == "gibbs":
        pi = gibbs_distribution(game)
        io.write_distribution(path, pi)
        emit(path)
        return {"states": N}
    if op in ("simulate", "trajectories"):
        from .sim import SimConfig, hitting_times, simulate

        # the default target is all-zeros, so start from the opposite corner
        start = _profile(game, cfg["start"]) if "start" in cfg else [1] * game.n
        steps = int(cfg.get("steps", 1000))
        reps = int(cfg.get("replicas", 1))
        seed = int(cfg.get("seed", 0))
        threads = cfg.get("threads")
        if op == "simulate":
            target = cfg.get("target", "all-zeros")
            if not isinstance(target, str):
                raise ExperimentError("$.target: simulate needs a predicate string")
            samples = hitting_times(game, start, target, steps, reps, seed, threads)
            io.write_hitting_samples(path, samples)
            emit(path)
            return {"censored": int(samples.censored.sum()), "replicas": reps}
        traj = simulate(game, start, SimConfig(steps, reps, seed, int(cfg.get("record_every", steps))), threads)
        io.write_trajectories(path, traj)
        emit(path)
        return {"snapshots": int(traj.bits.shape[1]), "replicas": reps}
    P = logit_kernel(game)
    if op == "matrix":
        io.write_matrix(path, build_transition_matrix(game))
        emit(path)
        return {"states": N}
    if op == "drift":
        mu = _distribution(game, cfg.get("mu"))
        value = float(tv_distance(mu @ P, mu))
        io.write_rows(path, ["drift"], [(value,)])
        emit(path)
        return value
    if op == "bottleneck":
        value = bottleneck_ratio(P, gibbs_distribution(game), cfg.get("subset", "all-zeros"))
        io.write_rows(path, ["bottleneck"], [(value,)])
        emit(path)
        return value
    start = _state_index(game, cfg.get("start", 0))
    if op == "hit-prob":
        value = absorbing_hit_probability(P, cfg.get("target", "all-zeros"), cfg.get("avoid", "all-ones"), start)
        io.write_rows(path, ["start", "prob"], [(start, value)])
    elif op == "exit-time":
        from .chain import expected_absorption_time

        value = expected_absorption_time(P, cfg.get("target", "all-zeros"), start)
        io.write_rows(path, ["start", "time"], [(start, value)])
    elif op == "hit-cdf":
        cdf = hitting_time_cdf(P, cfg.get("target", "all-zeros"), start, int(cfg.get("t_max", 100)))
        io.write_curve(path, cdf, "prob")
        value = float(cdf[-1])
    elif op == "meta.certify":
        mu = _distribution(game, cfg.get("mu"))
        mu_id = str(cfg.get("mu", "pi"))
        eps = float(cfg.get("epsilon", 0.1))
        if cfg.get("mode", "exact") == "amplified":
            horizon = cfg.get("horizon")
            cert = certify_amplified(mu, P, eps, None if horizon is None else int(horizon), mu_id)
            io.write_rows(path, ["T", "one_step_drift", "drift_bound"], [(cert.T, cert.one_step_drift, cert.drift_max)])
        else:
            cert = certify_exact(mu, P, eps, int(cfg.get("horizon", 100)), mu_id)
            io.write_curve(path, cert.drift_curve, "tv")
        emit(path)
        return {**cert.to_dict(path.name), "valid": cert.valid}
    else:  # meta.pmt
        mu = _distribution(game, cfg.get("mu"))
        eps = float(cfg.get("epsilon", 0.1))
        rep = pseudo_mix_time(mu, P, cfg.get("subset", [start]), eps, int(cfg.get("horizon", 1000)))
        io.write_curve(path, rep.curve, "tv")
        emit(path)
        return rep.to_dict()
    emit(path)
    return value
