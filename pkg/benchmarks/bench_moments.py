#!/usr/bin/env python3
"""Benchmark the window-moment kernel: Numba JIT vs pure-NumPy fallback.

The per-window moment loop is the hot path of the pipeline (hundreds of
thousands of 5-7 day windows in the Monte Carlo suites).  This script times
both backends on the same batch and checks their numerical agreement.

Usage:
    python benchmarks/bench_moments.py [--windows N] [--iters I]

The package picks the backend at import time; set SKPLANE_DISABLE_NUMBA=1
to force the NumPy path in normal use.
"""

import argparse
import time

import numpy as np

from skplane._accel import HAVE_NUMBA
from skplane.kernels import BACKEND, _batch_moments_numpy, batch_moments


def make_batch(n_windows: int, rng: np.random.Generator):
    lengths = rng.integers(5, 8, n_windows)
    win = rng.standard_t(3, (n_windows, 7)) * 0.05
    return win, lengths


def time_fn(fn, win, lengths, iters: int):
    times = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn(win, lengths)
        times.append(time.perf_counter() - t0)
    return np.median(times), min(times)


def main():
    parser = argparse.ArgumentParser(description="Benchmark moment kernels")
    parser.add_argument("--windows", type=int, default=1_000_000,
                        help="windows per batch (default: 1,000,000)")
    parser.add_argument("--iters", type=int, default=7,
                        help="timed iterations per backend (default: 7)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    win, lengths = make_batch(args.windows, rng)
    print(f"batch: {args.windows:,} windows x up to 7 days  (active backend: {BACKEND})")

    if HAVE_NUMBA:
        t0 = time.perf_counter()
        batch_moments(win[:8], lengths[:8])
        print(f"JIT warmup: {time.perf_counter() - t0:.2f}s")

    results = []
    med, best = time_fn(_batch_moments_numpy, win, lengths, args.iters)
    results.append(("pure NumPy", med, best))
    if HAVE_NUMBA:
        med, best = time_fn(batch_moments, win, lengths, args.iters)
        results.append(("Numba JIT", med, best))
    else:
        print("numba unavailable or disabled; timing the NumPy path only")

    baseline = results[0][1]
    print(f"\n{'backend':<12} {'median (ms)':>12} {'best (ms)':>12} {'speedup':>8}")
    print("-" * 48)
    for label, med, best in results:
        print(f"{label:<12} {med * 1e3:>12.2f} {best * 1e3:>12.2f} {baseline / med:>7.2f}x")

    if HAVE_NUMBA:
        s1, k1, d1, z1 = batch_moments(win, lengths)
        s2, k2, d2, z2 = _batch_moments_numpy(win, lengths)
        keep = ~z1
        diffs = {
            "skew": np.max(np.abs(s1[keep] - s2[keep])),
            "kurt": np.max(np.abs(k1[keep] - k2[keep])),
            "delta": np.max(np.abs(d1[keep] - d2[keep])),
        }
        print("\nagreement (max |jit - numpy|):")
        for name, diff in diffs.items():
            print(f"  {name:<6} {diff:.2e}")
        ok = all(d < 1e-12 for d in diffs.values()) and np.array_equal(z1, z2)
        print("agreement check:", "PASS" if ok else "FAIL")


if __name__ == "__main__":
    main()
