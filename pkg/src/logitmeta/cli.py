"""Command-line entry point (``logitmeta``).

Subcommands::

    logitmeta list
    logitmeta preset toy3 --set eps=0.02 --out results --json
    logitmeta exact --op drift --game or --n 8 --beta 5 --mu uniform
    logitmeta simulate --game ring --n 50 --beta 8 --steps 1e6 --replicas 64 --seed 7
    logitmeta bd --op bd.ruin --chain magnetization --n 12 --beta 1 --start 8
    logitmeta meta --op meta.certify --game ising --n 8 --beta 1 --mu all-ones --epsilon 0.1
    logitmeta run --config job.json

Exit status is 0 when every assertion passes, 1 when a preset assertion
fails and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .experiments import (
    PRESETS,
    ExperimentError,
    HypothesisWarning,
    default_out_dir,
    run_generic,
    run_preset,
    _jsonable,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Long options only, and usage errors exit with status 2."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _int_or_bits(text: str):
    if "," in text:
        return [int(v) for v in text.split(",")]
    return int(text)


def _subset(text: str):
    parts = text.split(",")
    if all(p.strip().lstrip("-").isdigit() for p in parts):
        return [int(p) for p in parts]
    return text


def _add_game(p: argparse.ArgumentParser, required=True) -> None:
    p.add_argument("--game", choices=["or", "ising", "ring"], required=required)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    for k in "abcd":
        p.add_argument(f"--{k}", type=float, help="ring payoff (defaults 2, 1, 0, 0)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (default: $LOGITMETA_OUT or ./logitmeta-out)")
    p.add_argument("--json", action="store_true", help="print a machine-readable result")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logitmeta", description="Logit dynamics: exact chains, simulation and metastability checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("list", help="list the named presets")

    pre = sub.add_parser("preset", help="run a named experiment preset")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a parameter")
    pre.add_argument("--seed", type=int)
    _add_common(pre)

    ex = sub.add_parser("exact", help="dense or matrix-free computation on a game")
    ex.add_argument("--op", required=True, choices=["gibbs", "matrix", "drift", "bottleneck", "hit-prob", "exit-time", "hit-cdf"])
    _add_game(ex)
    ex.add_argument("--start", type=_int_or_bits, help="state index or comma-separated profile")
    ex.add_argument("--target", type=_subset)
    ex.add_argument("--avoid", type=_subset)
    ex.add_argument("--subset", type=_subset)
    ex.add_argument("--mu", type=_subset, help="'pi', 'uniform', a predicate or an index list")
    ex.add_argument("--t-max", type=float)
    _add_common(ex)

    sim = sub.add_parser("simulate", help="Monte Carlo hitting times or trajectories")
    sim.add_argument("--op", choices=["simulate", "trajectories"], default="simulate")
    _add_game(sim)
    sim.add_argument("--start", type=_int_or_bits)
    sim.add_argument("--target", help="predicate such as all-zeros, R or weight>=k")
    sim.add_argument("--steps", type=float, default=1000)
    sim.add_argument("--replicas", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--threads", type=int)
    sim.add_argument("--record-every", type=int)
    _add_common(sim)

    bdp = sub.add_parser("bd", help="birth-and-death chain computations")
    bdp.add_argument("--op", required=True, choices=["bd.ruin", "bd.exit-time", "bd.cdf", "bd.rates"])
    bdp.add_argument("--chain", required=True,
                     choices=["ehrenfest", "lazy-ehrenfest", "or-projection", "magnetization", "constant"])
    bdp.add_argument("--n", type=int, required=True)
    bdp.add_argument("--beta", type=float, default=0.0)
    bdp.add_argument("--up", type=float)
    bdp.add_argument("--down", type=float)
    bdp.add_argument("--start", type=int)
    bdp.add_argument("--lo", type=int)
    bdp.add_argument("--hi", type=int)
    bdp.add_argument("--target", type=_subset)
    bdp.add_argument("--t-max", type=float)
    _add_common(bdp)

    mp = sub.add_parser("meta", help="metastability certificates and pseudo-mixing times")
    mp.add_argument("--op", required=True, choices=["meta.certify", "meta.pmt"])
    _add_game(mp)
    mp.add_argument("--mu", type=_subset)
    mp.add_argument("--epsilon", type=float, default=0.1)
    mp.add_argument("--horizon", type=float)
    mp.add_argument("--mode", choices=["exact", "amplified"])
    mp.add_argument("--start", type=_int_or_bits)
    mp.add_argument("--subset", type=_subset)
    _add_common(mp)

    run = sub.add_parser("run", help="run a JSON config")
    run.add_argument("--config", required=True, help="path to a JSON file, or '-' for stdin")
    _add_common(run)
    return parser


_SKIP = {"command", "json", "set", "name", "config"}
_RENAME = {"t_max": "t_max", "record_every": "record_every", "chain": "preset"}


def _config_from_args(args: argparse.Namespace) -> dict:
    cfg = {}
    for key, value in vars(args).items():
        if key in _SKIP or value is None:
            continue
        key = _RENAME.get(key, key)
        if key == "game" or key == "preset" or key == "op" or key == "out":
            cfg[key] = value
        elif key in ("steps", "t_max", "horizon") and float(value).is_integer():
            cfg[key] = int(value)
        else:
            cfg[key] = value
    return cfg


def _parse_overrides(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ExperimentError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _print_preset(result, as_json: bool, out_dir: Path) -> None:
    if as_json:
        sys.stdout.write(result.to_json())
        return
    for a in result.assertions:
        mark = "PASS" if a.passed else "FAIL"
        note = " (vacuous)" if a.relation == "vacuous" else ""
        print(f"{mark} {a.id}{note}: measured={a.measured!r} {a.relation} expected={a.expected!r} tol={a.tolerance:g}")
    verdict = "all assertions passed" if result.passed else f"{len(result.failures())} assertion(s) failed"
    print(f"{result.name}: {verdict}; files in {out_dir / result.name}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    out_dir = Path(args.out) if getattr(args, "out", None) else default_out_dir()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", HypothesisWarning)
            if args.command == "list":
                for name in sorted(PRESETS):
                    print(f"{name:18s} {PRESETS[name].summary}")
                return EXIT_OK
            if args.command == "preset":
                result = run_preset(args.name, _parse_overrides(args.set), out_dir, args.seed)
                _print_preset(result, args.json, out_dir)
                code = EXIT_OK if result.passed else EXIT_FAIL
            else:
                if args.command == "run":
                    text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
                    try:
                        cfg = json.loads(text)
                    except json.JSONDecodeError as exc:
                        raise ExperimentError(f"config is not valid JSON: {exc}") from None
                    if not isinstance(cfg, dict):
                        raise ExperimentError("invalid config: $: expected an object")
                else:
                    cfg = _config_from_args(args)
                res = run_generic(cfg, out_dir)
                payload = {"op": res.op, "value": res.value, "files": res.files}
                if args.json:
                    print(json.dumps(_jsonable(payload), sort_keys=True))
                else:
                    print(f"{res.op}: {_jsonable(res.value)}")
                    for f in res.files:
                        print(f"  wrote {f}")
                code = EXIT_OK
        for w in caught:
            if issubclass(w.category, HypothesisWarning):
                print(f"warning: {w.message}", file=sys.stderr)
        return code
    except (ExperimentError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
