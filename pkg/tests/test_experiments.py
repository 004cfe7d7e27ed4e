import json
import warnings

import numpy as np
import pytest

from logitmeta.experiments import (
    PRESETS,
    Assertion,
    ExperimentError,
    HypothesisWarning,
    resolve_params,
    run_generic,
    run_preset,
)
from logitmeta.io import read_curve, read_distribution


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_passes_and_writes_summary(name, tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        result = run_preset(name, out_dir=tmp_path)
    failed = [(a.id, a.measured, a.expected) for a in result.failures()]
    assert result.passed, failed
    summary = json.loads((tmp_path / name / "summary.json").read_text())
    assert summary["preset"] == name and summary["passed"]
    for a in summary["assertions"]:
        assert {"id", "claim", "formula", "measured", "expected", "tolerance", "relation", "passed"} <= set(a)
    for f in summary["files"]:
        assert (tmp_path / name / f).exists()


@pytest.mark.parametrize("name", ["toy3", "coord2", "ring-bottlenecks", "bd-suite"])
def test_reruns_are_byte_identical(name, tmp_path):
    a = run_preset(name, out_dir=tmp_path / "a", seed=3)
    b = run_preset(name, out_dir=tmp_path / "b", seed=3)
    for f in a.files + ["summary.json"]:
        assert (tmp_path / "a" / name / f).read_bytes() == (tmp_path / "b" / name / f).read_bytes()


def test_toy3_example_values(tmp_path):
    r = run_preset("toy3", out_dir=tmp_path)
    by_id = {a.id: a for a in r.assertions}
    assert by_id["toy3.one-step"].measured == 1
    t, tv = read_curve(tmp_path / "toy3" / "toy3_pmt_from0.csv")
    assert t.tolist() == [0, 1] and tv[1] <= 1e-12


def test_or_uniform_example(tmp_path):
    r = run_preset("or-uniform-meta", out_dir=tmp_path)
    drift = {a.id: a for a in r.assertions}["or.uniform-drift"]
    assert drift.measured == pytest.approx(2 ** -8 * np.tanh(2.5), rel=1e-13)


def test_ruin_table_schema(tmp_path):
    run_preset("bd-suite", {"instances": 20}, out_dir=tmp_path)
    lines = (tmp_path / "bd-suite" / "ruin_table.csv").read_text().splitlines()
    assert lines[0] == "n,h,eps,delta,closed,oracle,absdiff"
    assert len(lines) == 21


def test_overrides_are_typed():
    p = resolve_params("or-pseudo-mix", {"n": "8", "betas": "5,7.5", "weights": [1, 2]})
    assert p["n"] == 8 and p["betas"] == [5.0, 7.5] and p["weights"] == [1, 2]
    assert resolve_params("ring-pseudo", {"threads": 2.0})["threads"] == 2
    with pytest.raises(ExperimentError, match="unknown parameter"):
        resolve_params("toy3", {"n": 3})
    with pytest.raises(ExperimentError, match="expects int"):
        resolve_params("or-uniform-meta", {"n": "eight"})
    with pytest.raises(ExperimentError, match="expects int"):
        resolve_params("or-uniform-meta", {"n": 2.5})
    with pytest.raises(ExperimentError, match="unknown preset"):
        resolve_params("nope")


def test_hypothesis_warnings(tmp_path):
    with pytest.warns(HypothesisWarning, match="window is empty"):
        r = run_preset("or-pseudo-mix", {"betas": [10.0], "weights": [5]}, out_dir=tmp_path)
    assert r.observations["hypothesis_warnings"]
    with pytest.warns(HypothesisWarning):
        run_preset("ising-pi-meta", {"beta": 0.5, "exact_horizon": 10}, out_dir=tmp_path)


def test_failing_assertion_reports_false(tmp_path):
    # at low beta the consensus split is far from d/n
    r = run_preset("ring-nodom", {"beta": 1.0, "n_max": 8}, out_dir=tmp_path)
    assert not r.passed
    assert "ring.consensus-split" in {a.id for a in r.failures()}
    assert not json.loads((tmp_path / "ring-nodom" / "summary.json").read_text())["passed"]


def test_assertion_relations():
    assert Assertion("x", "", "", 1.0, 1.0 + 1e-13, 1e-12).passed
    assert not Assertion("x", "", "", 1.1, 1.0, 0.0, "le").passed
    assert Assertion("x", "", "", 0.9, 1.0, 0.2, "ge").passed
    assert Assertion("x", "", "", None, 1.0, 0.0, "vacuous").passed
    assert not Assertion("x", "", "", float("nan"), 1.0, 1.0).passed
    with pytest.raises(ValueError):
        Assertion("x", "", "", 1.0, 1.0, 0.0, "approx")


def test_invalid_override_surfaces_as_experiment_error(tmp_path):
    with pytest.raises(ExperimentError):
        run_preset("ising-convergence", {"magnetization": 7}, out_dir=tmp_path)
    with pytest.raises(ExperimentError):
        run_preset("ring-nodom", {"a": 2.0}, out_dir=tmp_path)


# ---------------------------------------------------------------- generic configs

def test_generic_gibbs_uniform(tmp_path):
    res = run_generic({"game": "ising", "op": "gibbs", "n": 6, "beta": 0}, tmp_path)
    mu = read_distribution(res.files[0])
    assert np.allclose(mu, 1 / 64, atol=0)


def test_generic_bd_ruin(tmp_path):
    res = run_generic({"op": "bd.ruin", "preset": "magnetization", "n": 12, "beta": 1, "start": 8}, tmp_path)
    assert 0.0 <= res.value <= 1.0
    assert json.loads((tmp_path / "result.json").read_text())["value"] == res.value


def test_generic_simulate_is_reproducible(tmp_path):
    cfg = {"op": "simulate", "game": "ring", "n": 50, "beta": 8, "steps": 1e5, "replicas": 8, "seed": 7}
    a = run_generic(cfg, tmp_path / "a")
    b = run_generic(dict(cfg, threads=4), tmp_path / "b")
    assert (tmp_path / "a" / "simulate.csv").read_bytes() == (tmp_path / "b" / "simulate.csv").read_bytes()
    assert a.value == b.value


@pytest.mark.parametrize(
    "cfg",
    [
        {"op": "matrix", "game": "or", "n": 3, "beta": 1},
        {"op": "drift", "game": "or", "n": 4, "beta": 1, "mu": "uniform"},
        {"op": "bottleneck", "game": "ring", "n": 4, "beta": 1, "subset": "R"},
        {"op": "hit-prob", "game": "ring", "n": 4, "beta": 1, "a": 1, "b": 1, "start": [0, 1, 1, 0]},
        {"op": "exit-time", "game": "ising", "n": 4, "beta": 0.3, "start": 5, "target": "all-ones"},
        {"op": "hit-cdf", "game": "ising", "n": 4, "beta": 0.3, "start": 5, "target": [15], "t_max": 30},
        {"op": "trajectories", "game": "or", "n": 5, "beta": 2, "steps": 50, "record_every": 10, "replicas": 2},
        {"op": "meta.certify", "game": "ising", "n": 5, "beta": 1, "mu": "all-ones", "horizon": 20},
        {"op": "meta.certify", "game": "ising", "n": 5, "beta": 1, "mu": "all-ones", "mode": "amplified"},
        {"op": "meta.pmt", "game": "or", "n": 5, "beta": 3, "mu": "uniform", "subset": [31], "horizon": 300},
        {"op": "bd.exit-time", "preset": "ehrenfest", "n": 10, "start": 5},
        {"op": "bd.cdf", "preset": "lazy-ehrenfest", "n": 10, "start": 2, "target": [0], "t_max": 20},
        {"op": "bd.rates", "preset": "or-projection", "n": 6, "beta": 1},
        {"op": "bd.ruin", "preset": "constant", "n": 6, "up": 0.3, "down": 0.2, "start": 2},
    ],
    ids=lambda c: c["op"],
)
def test_generic_ops(cfg, tmp_path):
    res = run_generic(cfg, tmp_path)
    assert res.files
    assert (tmp_path / "result.json").exists()


@pytest.mark.parametrize(
    "cfg,path",
    [
        ({"op": "gibbs", "game": "ising", "n": "six"}, "$.n"),
        ({"op": "gibbs", "game": "chess", "n": 3}, "$.game"),
        ({"op": "explode", "game": "or", "n": 3}, "$.op"),
        ({"op": "gibbs", "n": 3}, "$:"),
        ({"op": "bd.ruin", "n": 3, "start": 1}, "$:"),
        ({"op": "gibbs", "game": "or", "n": 3, "colour": "red"}, "$:"),
        ({"op": "meta.pmt", "game": "or", "n": 3, "subset": [-1]}, "$.subset"),
    ],
)
def test_schema_errors_are_path_addressed(cfg, path):
    with pytest.raises(ExperimentError) as err:
        run_generic(cfg)
    assert path in str(err.value)


def test_generic_runtime_errors(tmp_path):
    with pytest.raises(ExperimentError, match="start"):
        run_generic({"op": "bd.ruin", "preset": "ehrenfest", "n": 4}, tmp_path)
    with pytest.raises(ExperimentError, match="out of range"):
        run_generic({"op": "hit-prob", "game": "or", "n": 3, "start": 9}, tmp_path)
