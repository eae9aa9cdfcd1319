"""Compiled vs numpy kernels on the two oracle workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints per-kernel wall time for each backend, the speed-up, and whether the
two backends returned identical results.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from isac_edge import _kernels_py

try:
    from isac_edge import _kernels
except ImportError:  # extension not built
    _kernels = None


def beam_case(rng):
    n = 4
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h2 = float(np.vdot(h, h).real)
    u1 = h / math.sqrt(h2)
    gp = g - u1 * np.vdot(u1, g)
    u2 = gp / np.linalg.norm(gp)
    floor = 0.3 * float(np.vdot(g, g).real)
    args = (complex(np.vdot(g, u1)), complex(np.vdot(g, u2)), complex(np.vdot(h, u1)),
            complex(np.vdot(h, u2)), h2, 1.0, 0.05, floor)
    return args + (0.0, 1.0, 64, 0.0, math.pi / 2, 64, 0.0, 2 * math.pi, 64)


def simplex_case(rng, m=3, cells=10_000):
    a = rng.uniform(1.0, 3.0, m)
    b = rng.uniform(0.3, 1.0, m)
    pi = rng.uniform(1.0, 10.0, m)
    tau = 200.0 * np.arange(cells + 1) / cells
    with np.errstate(divide="ignore"):
        table = a[:, None] * (pi[:, None] * tau[None, :]) ** (-b[:, None])
    return table, cells


def timed(fn, args, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(x, y) -> bool:
    return all(np.array_equal(np.asarray(p), np.asarray(q), equal_nan=True) for p, q in zip(x, y))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    cases = {
        "beam_grid_search (65^3)": ("beam_grid_search", beam_case(rng)),
        "simplex_minmax (M=3, 1e4)": ("simplex_minmax", simplex_case(rng)),
    }
    print(f"{'kernel':28s} {'python s':>10s} {'cython s':>10s} {'speed-up':>9s}  match")
    for label, (name, case) in cases.items():
        t_py, out_py = timed(getattr(_kernels_py, name), case, args.repeat)
        if _kernels is None:
            print(f"{label:28s} {t_py:10.4f} {'n/a':>10s} {'n/a':>9s}  n/a")
            continue
        t_cy, out_cy = timed(getattr(_kernels, name), case, args.repeat)
        print(f"{label:28s} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:8.1f}x  {same(out_py, out_cy)}")


if __name__ == "__main__":
    main()
