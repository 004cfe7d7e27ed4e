import runpy
from pathlib import Path

import numpy as np
import pytest

from logitmeta.chain import build_transition_matrix, hitting_time_cdf
from logitmeta.games import GameError, index_profile, ising_game, or_game, profile_index, ring_game
from logitmeta.rng import Stream
from logitmeta.sim import (
    BACKEND,
    Censored,
    SimConfig,
    Target,
    compiled_available,
    counts_to_row,
    coupled_run,
    dkw_half_width,
    empirical_tv_bound,
    get_kernels,
    hitting_time_sample,
    hitting_times,
    minimal_elements,
    one_step_counts,
    precedes,
    simulate,
    step,
)

BACKENDS = ["python"] + (["compiled"] if compiled_available() else [])
GAMES = [or_game(5, 2.0), ising_game(5, 0.4), ring_game(6, 1.5, 2, 1, 0, 0)]


def test_backend_selection():
    assert BACKEND in ("python", "compiled")
    assert get_kernels("python").__name__.endswith("_pykernels")
    with pytest.raises(ValueError):
        get_kernels("fortran")


@pytest.mark.skipif(not compiled_available(), reason="compiled kernels not built")
@pytest.mark.parametrize("game", GAMES, ids=lambda g: g.family.value)
def test_backends_bit_identical(game):
    start = index_profile(game, 5)
    cfg = SimConfig(400, 3, 11, 7)
    a = simulate(game, start, cfg, backend="python")
    b = simulate(game, start, cfg, backend="compiled")
    assert np.array_equal(a.bits, b.bits)
    ha = hitting_times(game, start, "all-ones|all-zeros", 500, 8, 3, backend="python")
    hb = hitting_times(game, start, "all-ones|all-zeros", 500, 8, 3, backend="compiled")
    assert np.array_equal(ha.tau, hb.tau) and np.array_equal(ha.censored, hb.censored)
    x, y = [0] * 6, [1] * 6
    if game.family.value == "ring":
        s1 = coupled_run(game, x, y, 300, Stream(4), "monotone", backend="python")
        s2 = coupled_run(game, x, y, 300, Stream(4), "monotone", backend="compiled")
        assert s1 == s2


@pytest.mark.parametrize("backend", BACKENDS)
def test_thread_count_does_not_change_results(backend):
    g = ring_game(8, 2.0, 2, 1, 0, 0)
    one = hitting_times(g, [1] * 8, "R", 2000, 32, seed=9, threads=1, backend=backend)
    many = hitting_times(g, [1] * 8, "R", 2000, 32, seed=9, threads=4, backend=backend)
    assert np.array_equal(one.tau, many.tau)
    t1 = simulate(g, [1] * 8, SimConfig(100, 6, 2, 10), threads=1, backend=backend)
    t4 = simulate(g, [1] * 8, SimConfig(100, 6, 2, 10), threads=3, backend=backend)
    assert np.array_equal(t1.bits, t4.bits)


def test_reference_stepper_matches_kernels():
    g = ising_game(4, 0.7)
    rng = Stream(3)
    x = np.array([1, -1, 1, -1])
    xs = [x]
    for _ in range(50):
        x = step(g, x, rng)
        xs.append(x)
    traj = simulate(g, xs[0], SimConfig(50, 1, 3, 1), backend="python")
    assert [profile_index(g, v) for v in xs] == traj.state_indices()[0]


@pytest.mark.parametrize("game", GAMES, ids=lambda g: g.family.value)
def test_one_step_law_matches_exact_row(game):
    P = build_transition_matrix(game)
    x = index_profile(game, 9)
    cx, _ = one_step_counts(game, x, 200_000, Stream(1))
    bits = [int(v) for v in format(9, f"0{game.n}b")]
    row = counts_to_row(bits, cx)
    assert 0.5 * np.abs(row - P[9]).sum() <= 0.01


@pytest.mark.parametrize("game", GAMES, ids=lambda g: g.family.value)
def test_hitting_cdf_inside_dkw_band(game):
    N = game.num_states
    start = index_profile(game, 1)
    targets = "all-ones"
    exact = hitting_time_cdf(build_transition_matrix(game), [N - 1], 1, 400)
    samples = hitting_times(game, start, targets, 400, 4000, seed=17)
    emp = samples.cdf(400)
    assert np.abs(emp - exact).max() <= dkw_half_width(4000, 0.01)


def test_monotone_coupling_never_violates_order():
    g = ring_game(7, 1.2, 2, 1, 0, 0)
    rng = Stream(8)
    for _ in range(20):
        st = coupled_run(g, [1, 0, 1, 1, 0, 1, 1], [0, 0, 1, 0, 0, 0, 1], 5000, rng, "monotone")
        assert st.violations == 0
    with pytest.raises(GameError):
        coupled_run(or_game(3, 1.0), [0, 0, 0], [1, 1, 1], 5, rng, "monotone")
    with pytest.raises(ValueError):
        coupled_run(g, [0] * 7, [1] * 7, 5, rng, "sideways")


def test_order_helpers():
    assert precedes([1, 1, 0], [1, 0, 0])
    assert not precedes([0, 1, 0], [1, 0, 0])
    mins = minimal_elements([[1, 1, 0], [1, 0, 0], [0, 1, 1], [1, 1, 0]])
    assert sorted(tuple(m) for m in mins) == [(0, 1, 1), (1, 1, 0)]


def test_targets():
    t = Target.parse("all-zeros|weight>=4|R", 5)
    assert t.contains([0, 0, 0, 0, 0]) and t.contains([1, 1, 1, 1, 0]) and t.contains([1, 0, 0, 1, 1])
    assert not t.contains([1, 0, 1, 0, 1])
    assert Target.state([1, 0]).contains([1, 0])
    with pytest.raises(ValueError):
        Target.parse("heavy", 3)


def test_hitting_sample_variants():
    g = or_game(3, 0.0)
    assert hitting_time_sample(g, [0, 0, 0], "all-zeros", 5, Stream(1)) == 0
    cens = hitting_time_sample(ring_game(6, 20.0, 2, 1, 0, 0), [1] * 6, "all-zeros", 3, Stream(1))
    assert isinstance(cens, Censored) and cens.cap == 3
    t = hitting_time_sample(g, [1, 1, 1], lambda x: x.sum() == 0, 10_000, Stream(2))
    assert isinstance(t, int)
    with pytest.raises(ValueError):
        hitting_time_sample(g, [1, 1, 1], "all-zeros", 0, Stream(1))
    s = hitting_times(g, [1, 1, 1], "all-zeros", 2, 50, seed=1)
    with pytest.raises(ValueError):
        s.survival(2)


def test_empirical_tv_bound_methods():
    ring = ring_game(6, 2.0, 2, 1, 0, 0)
    est = empirical_tv_bound(ring, [[1] * 6, [1, 1, 1, 1, 1, 0]], 50, 400, seed=1)
    assert est.method == "monotone" and 0 <= est.point <= est.upper <= 1
    assert empirical_tv_bound(ring, [[1] * 6], 5, 10).method == "coalesced"
    assert empirical_tv_bound(ring, [[1] * 6, [0] * 6], 0, 10).method == "trivial"
    ising = ising_game(4, 0.2)
    pw = empirical_tv_bound(ising, [[1, 1, 1, 1], [-1, -1, 1, 1]], 200, 200, seed=2, threads=2)
    assert pw.method == "pairwise"
    assert pw == empirical_tv_bound(ising, [[1, 1, 1, 1], [-1, -1, 1, 1]], 200, 200, seed=2, threads=1)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(10, 0)
    with pytest.raises(ValueError):
        SimConfig(10, 1, 0, 0)
    with pytest.raises(ValueError):
        SimConfig(10, 1, -1)
    with pytest.raises(ValueError):
        SimConfig(-1)


@pytest.mark.skipif(not compiled_available(), reason="compiled kernels not built")
def test_benchmark_backends_agree(capsys):
    bench = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    assert bench["main"](["--scale", "0.001"]) == 0
    assert "run_chain ring" in capsys.readouterr().out
