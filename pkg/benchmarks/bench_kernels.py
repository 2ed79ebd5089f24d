"""Compare the compiled and pure-Python kernels on search and decoding.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hosc import kernels
from hosc.simulator import SimConfig, build_tables, frame_rng, sample_errors
from hosc.staircase import build_spec


def _best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_search(mod, repeat: int) -> tuple[float, int]:
    zeros = [0.0] * 4
    out = {}

    def run():
        out["res"] = mod.run_search(3, 3, 19, 7, 20000, zeros, zeros, False)

    t = _best_of(run, repeat)
    return t, out["res"][1]


def bench_decode(mod, repeat: int, eps: float) -> tuple[float, int, tuple[int, int]]:
    spec = build_spec(1, 3, 25)
    tables = build_tables(spec, SimConfig(W=14, I=6, F=200))
    pos = sample_errors(eps, tables.frame_bits, frame_rng(0, 0, 0))
    out = {}

    def run():
        out["res"] = mod.decode_frame(tables, pos)

    t = _best_of(run, repeat)
    return t, tables.frame_bits, out["res"]


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--eps", type=float, default=0.02)
    a = ap.parse_args(argv)
    try:
        mods = [kernels.backend("cython"), kernels.backend("python")]
    except ImportError:
        print("compiled kernels not built; only the Python backend is available")
        mods = [kernels.backend("python")]
    rows = []
    for mod in mods:
        ts, attempts = bench_search(mod, a.repeat)
        td, bits, res = bench_decode(mod, a.repeat, a.eps)
        rows.append((mod.BACKEND, ts, attempts, td, bits, res))
    print(f"{'backend':8s} {'search s':>10s} {'attempts/s':>12s} {'decode s':>10s} {'Mbit/s':>9s} residual")
    for name, ts, attempts, td, bits, res in rows:
        print(f"{name:8s} {ts:10.4f} {attempts / ts:12.3e} {td:10.4f} {bits / td / 1e6:9.3f} {res[0]}")
    if len(rows) == 2:
        same = rows[0][5] == rows[1][5]
        print(f"speedup: search x{rows[1][1] / rows[0][1]:.1f}, decode x{rows[1][3] / rows[0][3]:.1f}; "
              f"identical decode results: {same}")


if __name__ == "__main__":
    main()
