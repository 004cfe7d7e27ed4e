import math

import numpy as np
import pytest

from logitmeta.chain import build_transition_matrix
from logitmeta.games import ising_game, or_game
from logitmeta.projection import (
    BirthDeathChain,
    RateError,
    chain_from_matrix,
    constant_rate_chain,
    ehrenfest,
    lazy,
    lumpability_check,
    magnetization_chain,
    or_projection,
    weight_partition,
)

# 50-digit reference (mpmath): magnetisation rates at n=6, beta=0.5, k=2
P_K = 0.31752470894081107304
Q_K = 0.1792942809133300805


@pytest.mark.parametrize("n", [2, 4, 7])
@pytest.mark.parametrize("beta", [0.0, 1.0, 4.0])
def test_or_lumping(n, beta):
    rep = lumpability_check(build_transition_matrix(or_game(n, beta)), weight_partition(n))
    assert rep.max_deviation <= 1e-12
    assert np.abs(rep.lumped - or_projection(n, beta).to_matrix()).max() <= 1e-14


@pytest.mark.parametrize("n", [2, 5, 8])
@pytest.mark.parametrize("beta", [0.0, 0.5, 2.0])
def test_ising_lumping(n, beta):
    rep = lumpability_check(build_transition_matrix(ising_game(n, beta)), weight_partition(n))
    assert rep.max_deviation <= 1e-12
    assert np.abs(rep.lumped - magnetization_chain(n, beta).to_matrix()).max() <= 1e-14


def test_or_projection_written_out():
    n, beta = 6, 1.3
    M = or_projection(n, beta).to_matrix()
    assert M[1, 0] == pytest.approx(1 / (n * (1 + math.exp(-beta))), abs=1e-15)
    assert M[1, 1] == pytest.approx((n - 1) / (2 * n) + 1 / (n * (1 + math.exp(beta))), abs=1e-15)
    assert M[1, 2] == pytest.approx((n - 1) / (2 * n), abs=1e-15)
    for i in range(2, n + 1):
        assert M[i, i] == pytest.approx(0.5, abs=1e-15)
        assert M[i, i - 1] == pytest.approx(i / (2 * n), abs=1e-15)
        if i < n:
            assert M[i, i + 1] == pytest.approx((n - i) / (2 * n), abs=1e-15)


def test_magnetization_rates_frozen():
    chain = magnetization_chain(6, 0.5)
    j = chain.index_of(2)
    assert chain.p[j] == pytest.approx(P_K, rel=1e-14)
    assert chain.q[j] == pytest.approx(Q_K, rel=1e-14)
    assert chain.labels.tolist() == [-6, -4, -2, 0, 2, 4, 6]


def test_lumping_detects_failure():
    P = np.array([[0.5, 0.5, 0.0], [0.2, 0.3, 0.5], [0.0, 0.5, 0.5]])
    rep = lumpability_check(P, [0, 1, 1])
    assert rep.max_deviation == pytest.approx(0.2)
    assert rep.worst_block == 1
    with pytest.raises(ValueError):
        lumpability_check(P, [0, 1])
    same = lumpability_check(P, [[0], [1, 2]])
    assert same.max_deviation == rep.max_deviation


def test_rate_validation():
    with pytest.raises(RateError):
        BirthDeathChain([0.5, 0.0], [0.1, 0.5])
    with pytest.raises(RateError):
        BirthDeathChain([0.8, 0.0], [0.0, -0.1])
    with pytest.raises(RateError):
        BirthDeathChain([0.8, 0.9, 0.0], [0.0, 0.2, 0.1])
    with pytest.raises(RateError):
        ehrenfest(0)
    with pytest.raises(KeyError):
        magnetization_chain(4, 1.0).index_of(3)


def test_csv_round_trip():
    chain = magnetization_chain(5, 0.7).with_absorbing(True, False)
    back = BirthDeathChain.from_csv(chain.to_csv())
    # the table stores effective rates, so the kernel survives the round trip
    assert np.array_equal(back.to_matrix(), chain.to_matrix())
    assert back.absorbing == (True, False)
    assert np.array_equal(back.labels, chain.labels)


def test_matrix_round_trip_and_stationary():
    chain = ehrenfest(6)
    back = chain_from_matrix(chain.to_matrix())
    assert np.allclose(back.p, chain.p) and np.allclose(back.q, chain.q)
    pi = chain.stationary()
    binom = np.array([math.comb(6, k) for k in range(7)]) / 64
    assert np.abs(pi - binom).max() <= 1e-15
    L = lazy(chain).to_matrix()
    assert np.allclose(L, (chain.to_matrix() + np.eye(7)) / 2)


def test_absorbing_endpoints():
    c = constant_rate_chain(5, 0.3, 0.2)
    M = c.to_matrix()
    assert M[0, 0] == 1.0 and M[5, 5] == 1.0
    assert M[2, 3] == 0.3 and M[2, 1] == 0.2
