#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py
Both backends are imported directly, so DSK_BACKEND does not matter here.
"""

import time

import numpy as np

from dsk._kernels import _numba, _numpy


def bench(fn, *args, repeat=5, number=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def bench_levenshtein():
    rng = np.random.default_rng(0)
    print("levenshtein_matrix (unit-cost DP fill)")
    for n in (50, 200, 800):
        ref = rng.integers(0, 30, size=n)
        hyp = rng.integers(0, 30, size=n)
        _numba.levenshtein_matrix(ref, hyp)  # JIT warmup
        t_nb = bench(_numba.levenshtein_matrix, ref, hyp)
        t_np = bench(_numpy.levenshtein_matrix, ref, hyp)
        print(
            f"  n={n:4d}: numba {t_nb * 1e3:8.3f} ms  "
            f"numpy {t_np * 1e3:8.3f} ms  speedup x{t_np / t_nb:5.1f}"
        )


def bench_smo():
    rng = np.random.default_rng(1)
    print("smo_solve (SVM dual, maximal violating pair)")
    for n in (40, 120, 400):
        X = rng.normal(size=(n, 10))
        y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        X[y > 0, 0] += 1.0
        K = X @ X.T
        _numba.smo_solve(K, y, 10.0, 1e-4, 1_000_000)  # JIT warmup
        t_nb = bench(_numba.smo_solve, K, y, 10.0, 1e-4, 1_000_000, number=5)
        t_np = bench(_numpy.smo_solve, K, y, 10.0, 1e-4, 1_000_000, number=5)
        print(
            f"  n={n:4d}: numba {t_nb * 1e3:8.3f} ms  "
            f"numpy {t_np * 1e3:8.3f} ms  speedup x{t_np / t_nb:5.1f}"
        )


if __name__ == "__main__":
    bench_levenshtein()
    bench_smo()
