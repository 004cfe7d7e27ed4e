import json

import pytest

from logitmeta.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "toy3" in out and "bd-suite" in out


def test_preset_pass_and_json(out_dir, capsys):
    assert main(["preset", "toy3", "--json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] and payload["preset"] == "toy3"
    assert (out_dir / "toy3" / "summary.json").exists()


def test_preset_failure_exit_code(tmp_path, capsys):
    code = main(["preset", "ring-nodom", "--set", "beta=1", "--set", "n_max=6", "--out", str(tmp_path)])
    assert code == EXIT_FAIL
    assert "FAIL ring.consensus-split" in capsys.readouterr().out


def test_preset_warnings_go_to_stderr(tmp_path, capsys):
    assert main(["preset", "or-pseudo-mix", "--set", "weights=5", "--set", "betas=10", "--out", str(tmp_path)]) == EXIT_OK
    assert "warning:" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["preset", "nosuch"],
        ["preset", "toy3", "--set", "eps"],
        ["preset", "toy3", "--set", "colour=red"],
        ["exact", "--op", "gibbs", "--game", "ising", "-n", "3"],
        ["exact", "--op", "gibbs", "--game", "ising", "--n", "3", "--be", "1"],
        ["bd", "--op", "bd.ruin", "--chain", "ehrenfest", "--n", "4"],
        ["run", "--config", "/nonexistent.json"],
        [],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    assert main(argv + (["--out", str(tmp_path)] if argv and argv[0] in ("preset",) else [])) == EXIT_USAGE


def test_exact_simulate_bd_meta(tmp_path, capsys):
    out = ["--out", str(tmp_path)]
    assert main(["exact", "--op", "drift", "--game", "or", "--n", "8", "--beta", "5", "--mu", "uniform", "--json"] + out) == 0
    value = json.loads(capsys.readouterr().out)["value"]
    assert value == pytest.approx(0.0038539621021540245659, rel=1e-13)
    assert main(["simulate", "--game", "ring", "--n", "20", "--beta", "2", "--steps", "1e4",
                 "--replicas", "4", "--seed", "7"] + out) == 0
    first = (tmp_path / "simulate.csv").read_bytes()
    assert main(["simulate", "--game", "ring", "--n", "20", "--beta", "2", "--steps", "1e4",
                 "--replicas", "4", "--seed", "7", "--threads", "2"] + out) == 0
    assert (tmp_path / "simulate.csv").read_bytes() == first
    assert main(["bd", "--op", "bd.ruin", "--chain", "magnetization", "--n", "12", "--beta", "1", "--start", "8"] + out) == 0
    assert main(["meta", "--op", "meta.pmt", "--game", "or", "--n", "5", "--beta", "3", "--mu", "uniform",
                 "--subset", "31", "--horizon", "300"] + out) == 0
    assert main(["exact", "--op", "hit-cdf", "--game", "ising", "--n", "4", "--start", "1,1,-1,-1",
                 "--target", "15", "--t-max", "5"] + out) == 0


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"op": "gibbs", "game": "ising", "n": 6, "beta": 0}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    assert (tmp_path / "o" / "gibbs.csv").read_text().startswith("dim,64\n")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"op": "gibbs", "game": "ising", "n": "six"}))
    assert main(["run", "--config", str(bad)]) == EXIT_USAGE
    assert "$.n" in capsys.readouterr().err
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == EXIT_USAGE
