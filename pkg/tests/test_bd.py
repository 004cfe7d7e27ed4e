import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from logitmeta import bd
from logitmeta.projection import (
    BirthDeathChain,
    RateError,
    constant_rate_chain,
    ehrenfest,
    lazy,
    magnetization_chain,
)

import oracle

# 50-digit reference values (mpmath), frozen
RUIN_10_3 = 0.71612236105127100388  # n=10, h=3, up 0.3, down 0.2
RUIN_40_35 = 0.0009765625  # n=40, h=35, up 0.1, down 0.4 equals 4^-5


def test_closed_form_frozen():
    assert bd.ruin_probability_constant_rates(10, 3, 0.3, 0.2) == pytest.approx(RUIN_10_3, rel=1e-14)
    assert bd.ruin_probability_constant_rates(40, 35, 0.1, 0.4) == pytest.approx(RUIN_40_35, rel=1e-12)
    assert bd.ruin_probability_constant_rates(7, 3, 0.25, 0.25) == pytest.approx(3 / 7)


@given(st.integers(1, 300), st.data(), st.floats(0.001, 0.9), st.floats(0.001, 0.9))
def test_closed_form_against_solver(n, data, up, down):
    h = data.draw(st.integers(0, n))
    scale = min(1.0, 0.99 / (up + down))
    up, down = up * scale, down * scale
    closed = bd.ruin_probability_constant_rates(n, h, up, down)
    solved = bd.ruin_probability(constant_rate_chain(n, up, down), h)
    assert 0.0 <= closed <= 1.0
    assert closed == pytest.approx(solved, abs=1e-10)


def test_solver_against_dense_oracle():
    for n, h, up, down in [(5, 2, 0.3, 0.4), (12, 7, 0.1, 0.05), (30, 1, 0.45, 0.5)]:
        assert bd.ruin_probability(constant_rate_chain(n, up, down), h) == pytest.approx(
            oracle.gambler_ruin(n, h, up, down), abs=1e-12)


def test_degenerate_rates_warn():
    with pytest.warns(bd.DegenerateChainWarning):
        assert bd.ruin_probability_constant_rates(5, 2, 0.0, 0.3) == 0.0
    with pytest.warns(bd.DegenerateChainWarning):
        assert bd.ruin_probability_constant_rates(5, 2, 0.3, 0.0) == 1.0
    with pytest.raises(ValueError):
        bd.ruin_probability_constant_rates(5, 6, 0.3, 0.3)
    with pytest.raises(ValueError):
        bd.ruin_probability_constant_rates(5, 2, 0.7, 0.6)


@given(st.integers(2, 40), st.floats(0.05, 0.95), st.integers(0, 2 ** 32 - 1))
def test_geometric_bound_dominates(n, alpha, seed):
    rng = np.random.default_rng(seed)
    up = rng.uniform(0.05, 0.5, n + 1)
    down = up * alpha * rng.uniform(0, 1, n + 1)
    up[-1] = down[0] = 0.0
    chain = BirthDeathChain(up, down)
    for h in range(1, n):
        low, high = bd.exit_probabilities(chain, h)
        assert low + high == pytest.approx(1.0, abs=1e-12)
        assert low <= bd.ruin_bound_geometric(chain, h, alpha) + 1e-14


def test_geometric_bound_rejects_wrong_alpha():
    with pytest.raises(RateError):
        bd.ruin_bound_geometric(ehrenfest(10), 5, 0.5)


def test_laziness():
    n = 64
    base, slow = ehrenfest(n), lazy(ehrenfest(n))
    assert np.abs(bd.ruin_probabilities(base) - bd.ruin_probabilities(slow)).max() <= 1e-12
    t = math.ceil(n * math.log(n) + 2 * n)
    for k in (1, 2, 3):
        assert (bd.hit_cdf_1d(slow, [0], k, t) <= bd.hit_cdf_1d(base, [0], k, t) + 1e-15).all()


def test_ehrenfest_early_hits_decrease_with_start():
    n = 64
    t = math.ceil(n * math.log(n) + 2 * n)
    vals = [bd.hit_cdf_1d(ehrenfest(n), [0], k, t)[t - 1] for k in (1, 2, 3)]
    assert vals[0] >= vals[1] >= vals[2]


def test_exit_time_bound_on_magnetisation():
    for n in range(2, 21):
        for beta in (0.5, 1.0, 2.0):
            chain = magnetization_chain(n, beta)
            for h in range(n // 2 + 1, n):
                assert bd.exit_time_expectation(chain, h, n // 2, n) <= n ** 3


def test_exit_time_matches_dense_solve():
    chain = ehrenfest(8)
    M = chain.to_matrix()
    inner = list(range(1, 8))
    Q = M[np.ix_(inner, inner)]
    times = np.linalg.solve(np.eye(7) - Q, np.ones(7))
    for h in inner:
        assert bd.exit_time_expectation(chain, h, 0, 8) == pytest.approx(times[h - 1], rel=1e-12)


def test_hit_cdf_against_matrix_oracle():
    chain = magnetization_chain(9, 0.4)
    M = chain.to_matrix()
    assert np.abs(bd.hit_cdf_1d(chain, [9], 5, 200) - oracle.hit_cdf(M, [9], 5, 200)).max() <= 1e-14


def test_half_interval_exit():
    n, beta = 20, 1.0
    chain = magnetization_chain(n, beta)
    for k in (4, 6, 8, 10):
        low, _ = bd.exit_probabilities(chain, chain.index_of(k), chain.index_of(0), chain.index_of(n // 2))
        assert low <= 1 / n


def test_full_interval_exit():
    n, beta = 20, 1.5
    chain = magnetization_chain(n, beta)
    low, _ = bd.exit_probabilities(chain, chain.index_of(n // 2), chain.index_of(0), n)
    assert low <= (2 / n) ** (n / 8)


def test_interval_validation():
    with pytest.raises(ValueError):
        bd.exit_probabilities(ehrenfest(5), 6)
    with pytest.raises(ValueError):
        bd.exit_probabilities(ehrenfest(5), 2, 3, 1)
