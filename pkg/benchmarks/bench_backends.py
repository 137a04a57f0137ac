#!/usr/bin/env python3
"""Benchmark the compiled core against the pure-Python fallback.

Times the hot loops (twin traces, phase grids, fixed-point solves, Gram
sequences) on both backends and prints a speedup table. Run after an
editable install:

    python benchmarks/bench_backends.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from rkstab import _core_py

try:
    from rkstab import _core
except ImportError:
    _core = None


def best_of(repeat, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def _near_frontier_solve(impl):
    # sigma_i sits ~1e-5 inside the stability frontier at sigma_r = 1.2, where
    # the cross-term iteration is critically slow
    a, _, _, _ = impl.solve_erf_a(1.2, 0.256660, 1e-12, 10**6)
    return impl.solve_erf_b(1.2, 0.256660, a, 1e-12, 10**6)


BENCHES = [
    (
        "twin_trace erf sr=0.99 t=2e5",
        lambda impl: impl.twin_trace(0, 0.99, 0.3, 200_000, 1e12),
    ),
    (
        "twin_trace relu sr=1.41 t=2e5",
        lambda impl: impl.twin_trace(2, 1.41, 1.0, 200_000, 1e12),
    ),
    (
        "phase_grid erf 81x81 t=200",
        lambda impl: impl.phase_grid(
            0, np.linspace(0.0, 2.0, 81), np.linspace(0.0, 2.0, 81), 200, 1e12
        ),
    ),
    (
        "fixed points near frontier",
        _near_frontier_solve,
    ),
    (
        "gram_sequence erf t=5e4",
        lambda impl: impl.gram_sequence(
            0, 1.1, 0.7, np.linspace(-1.0, 1.0, 50_000), 1.0, 0.0, 1.0, 1e12
        ),
    ),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = parser.parse_args()

    if _core is None:
        print("compiled core not available; only timing the pure-Python backend")

    width = max(len(name) for name, _ in BENCHES)
    header = f"{'benchmark':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, bench in BENCHES:
        t_py, _ = best_of(args.repeat, bench, _core_py)
        if _core is not None:
            t_c, _ = best_of(args.repeat, bench, _core)
            print(f"{name:<{width}}  {t_py*1e3:>8.2f}ms  {t_c*1e3:>8.2f}ms  {t_py/t_c:>7.1f}x")
        else:
            print(f"{name:<{width}}  {t_py*1e3:>8.2f}ms  {'-':>10}  {'-':>8}")


if __name__ == "__main__":
    main()
