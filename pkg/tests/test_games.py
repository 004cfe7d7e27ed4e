import numpy as np
import pytest
from hypothesis import given, strategies as st

from logitmeta.games import (
    Family,
    GameError,
    GameSpec,
    all_bits,
    index_profile,
    ising_game,
    or_game,
    potential,
    potential_difference_check,
    potential_vector,
    profile_index,
    profile_stats,
    ring_game,
    two_player_coordination,
    utility,
    utility_vector,
)

import oracle


def games(max_n=8):
    n = st.integers(1, max_n)
    beta = st.floats(0, 5)
    gain = st.floats(0.1, 3)
    ring = st.builds(
        lambda n, beta, big, small, c: ring_game(n, beta, c + small + big, c + small, c, c),
        n, beta, gain, gain, st.floats(-2, 2),
    )
    return st.one_of(st.builds(or_game, n, beta), st.builds(ising_game, n, beta), ring)


@given(games(), st.data())
def test_unilateral_deviation_matches_potential(game, data):
    x = data.draw(st.lists(st.sampled_from(game.alphabet), min_size=game.n, max_size=game.n))
    i = data.draw(st.integers(0, game.n - 1))
    s = data.draw(st.sampled_from(game.alphabet))
    du, dphi = potential_difference_check(game, x, i, s)
    assert du == pytest.approx(dphi, abs=1e-12)


@given(games(), st.data())
def test_index_round_trip(game, data):
    k = data.draw(st.integers(0, game.num_states - 1))
    assert profile_index(game, index_profile(game, k)) == k


def test_state_encoding_is_big_endian():
    g = or_game(3)
    assert profile_index(g, [1, 0, 0]) == 4
    assert profile_index(g, [0, 0, 1]) == 1
    ising = ising_game(3)
    assert profile_index(ising, [1, 1, 1]) == 7
    assert list(index_profile(ising, 0)) == [-1, -1, -1]


@pytest.mark.parametrize("family,payoffs", [("or", None), ("ising", None), ("ring", (2.0, 1.0, 0.0, 0.0))])
def test_utilities_against_oracle(family, payoffs):
    n = 5
    game = {"or": or_game(n), "ising": ising_game(n), "ring": ring_game(n, 0.0, 2, 1, 0, 0)}[family]
    bits = all_bits(n)
    for i in range(n):
        vec = utility_vector(game, bits, i)
        for k, x in enumerate(oracle.profiles(n)):
            assert vec[k] == oracle.utility(family, x, i, payoffs)
            assert utility(game, index_profile(game, k), i) == vec[k]


@given(games())
def test_potential_vector_matches_scalar(game):
    bits = all_bits(game.n)
    vec = potential_vector(game, bits)
    for k in range(0, game.num_states, max(1, game.num_states // 16)):
        assert vec[k] == pytest.approx(potential(game, index_profile(game, k)), abs=1e-12)


def test_ising_potential_closed_form():
    g = ising_game(4)
    assert potential(g, [1, 1, 1, 1]) == 0.5 * (16 - 4)
    assert potential(g, [1, -1, 1, -1]) == -2.0


def test_two_player_game_has_halved_ring_payoffs():
    g = two_player_coordination(1.0, 3, 1, 0, 0)
    assert (g.a, g.b, g.c, g.d) == (1.5, 0.5, 0.0, 0.0)
    # one play of the basic game per neighbour pair
    assert utility(g, [0, 0], 0) == 3.0
    assert utility(g, [1, 1], 1) == 1.0


def test_profile_stats_ring_levels():
    g = ring_game(6, 1.0, 2, 1, 0, 0)
    s = profile_stats(g, [0, 1, 1, 0, 0, 1])
    assert (s.zeros, s.ones, s.level) == (3, 3, 2)
    # player 0 sits between two 1s cyclically, as does player 5 between two 0s
    assert (s.singleton_zero_blocks, s.singleton_one_blocks) == (1, 1)
    assert profile_stats(g, [0] * 6).level == 0
    assert profile_stats(g, [0, 1, 0, 1, 0, 1]).singleton_zero_blocks == 3
    assert profile_stats(ising_game(3), [1, 1, -1]).magnetization == 1


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="or", n=0),
        dict(family="or", n=2.5),
        dict(family="or", n=3, beta=-1.0),
        dict(family="ring", n=3, beta=1.0),
        dict(family="ring", n=3, beta=1.0, a=1, b=2, c=0, d=0),
        dict(family="ring", n=3, beta=1.0, a=0, b=2, c=0, d=1),
    ],
)
def test_invalid_games(kwargs):
    with pytest.raises(GameError):
        GameSpec(**kwargs)


def test_invalid_profiles_and_players():
    g = ising_game(3)
    with pytest.raises(GameError):
        utility(g, [0, 1, 1], 0)
    with pytest.raises(GameError):
        utility(g, [1, 1, 1], 3)
    with pytest.raises(GameError):
        profile_index(g, [1, 1])


def test_json_round_trip():
    g = ring_game(4, 2.5, 3, 1, 0, 0.5)
    assert GameSpec.from_json(g.to_json()) == g
    assert GameSpec.from_dict({"family": "ising", "n": 3}).family is Family.ISING
    with pytest.raises(GameError):
        GameSpec.from_dict({"family": "chess", "n": 3})
    with pytest.raises(GameError):
        GameSpec.from_dict({"n": 3})


def test_all_bits_row_order():
    bits = all_bits(3)
    assert bits.shape == (8, 3)
    assert bits[5].tolist() == [1, 0, 1]
    assert np.array_equal(bits, np.array(oracle.profiles(3)))
