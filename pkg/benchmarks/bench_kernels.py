"""Compare the compiled and pure-Python simulation kernels.

Each case runs through both backends with the same seed, checks that the
outputs agree bit for bit and reports steps per second.

    python benchmarks/bench_kernels.py [--scale 0.1] [--json]
"""
import argparse
import json
import time

import numpy as np

from logitmeta.games import ising_game, or_game, ring_game
from logitmeta.rng import Stream
from logitmeta.sim import SimConfig, compiled_available, coupled_run, hitting_times, simulate


def _chain(backend, game, steps):
    cfg = SimConfig(steps, 4, 7, max(1, steps // 10))
    return simulate(game, [1] * game.n, cfg, threads=1, backend=backend).bits


def _hits(backend, game, steps):
    return hitting_times(game, [1] * game.n, "all-zeros", steps, 4, seed=7, threads=1, backend=backend).tau


def _coupled(backend, game, steps):
    st = coupled_run(game, [1] * game.n, [0] * game.n, steps, Stream(7, 0), "monotone", backend)
    return np.array([st.tau_couple, st.violations, st.tau_zero_x, st.eta])


CASES = [
    ("run_chain ring n=64", _chain, ring_game(64, 2.0, 2, 1, 0, 0), 200_000),
    ("run_chain ising n=32", _chain, ising_game(32, 0.3), 200_000),
    ("hit_time or n=16", _hits, or_game(16, 1.0), 50_000),
    ("coupled_run ring n=64", _coupled, ring_game(64, 2.0, 2, 1, 0, 0), 400_000),
]


def _time(fn, backend, game, steps):
    t0 = time.perf_counter()
    out = fn(backend, game, steps)
    return time.perf_counter() - t0, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every step count")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    if not compiled_available():
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    rows = []
    for name, fn, game, steps in CASES:
        steps = max(10, int(steps * args.scale))
        fn("compiled", game, 10)  # warm-up
        tc, oc = _time(fn, "compiled", game, steps)
        tp, op = _time(fn, "python", game, steps)
        rows.append(dict(case=name, steps=steps, compiled_s=tc, python_s=tp,
                         speedup=tp / tc if tc else float("inf"), identical=bool(np.array_equal(oc, op))))

    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'case':24s} {'steps':>8s} {'compiled s':>11s} {'python s':>10s} {'speedup':>8s}  same")
        for r in rows:
            print(f"{r['case']:24s} {r['steps']:8d} {r['compiled_s']:11.4f} {r['python_s']:10.3f} "
                  f"{r['speedup']:8.1f}  {r['identical']}")
    return 0 if all(r["identical"] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
