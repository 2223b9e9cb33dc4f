"""Backend parity and kernel correctness.

Both backends are imported directly so the parity checks run no matter
which one DSK_BACKEND selected for the package.
"""

import os
import subprocess
import sys
from functools import lru_cache

import numpy as np
import pytest

from dsk._kernels import _numba, _numpy


def oracle_edit_distance(ref: tuple, hyp: tuple) -> int:
    """Independent recursive-memo minimal edit distance."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(ref):
            return len(hyp) - j
        if j == len(hyp):
            return len(ref) - i
        best = go(i + 1, j + 1) + (ref[i] != hyp[j])
        return min(best, go(i, j + 1) + 1, go(i + 1, j) + 1)

    return go(0, 0)


class TestLevenshtein:
    def test_matches_oracle_on_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            n, m = rng.integers(0, 9, size=2)
            ref = rng.integers(0, 5, size=n)
            hyp = rng.integers(0, 5, size=m)
            d = _numpy.levenshtein_matrix(ref, hyp)
            assert d[n, m] == oracle_edit_distance(tuple(ref), tuple(hyp))

    def test_backends_agree_exactly(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n, m = rng.integers(0, 12, size=2)
            ref = rng.integers(0, 4, size=n)
            hyp = rng.integers(0, 4, size=m)
            a = _numba.levenshtein_matrix(ref, hyp)
            b = _numpy.levenshtein_matrix(ref, hyp)
            assert np.array_equal(a, b)

    def test_empty_inputs(self):
        empty = np.zeros(0, dtype=np.int64)
        one = np.array([3], dtype=np.int64)
        assert _numpy.levenshtein_matrix(empty, empty)[0, 0] == 0
        assert _numpy.levenshtein_matrix(empty, one)[0, 1] == 1
        assert _numpy.levenshtein_matrix(one, empty)[1, 0] == 1


def _random_problem(rng, n, d, separable):
    X = rng.normal(size=(n, d))
    y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    if separable:
        X[y > 0, 0] += 4.0
        X[y < 0, 0] -= 4.0
    K = X @ X.T
    return K, y


class TestSmoParity:
    def test_backends_bit_identical(self):
        rng = np.random.default_rng(13)
        for trial in range(20):
            n = int(rng.integers(4, 30))
            K, y = _random_problem(rng, n, 3, separable=trial % 2 == 0)
            a1, b1, g1, i1 = _numba.smo_solve(K, y, 10.0, 1e-4, 100_000)
            a2, b2, g2, i2 = _numpy.smo_solve(K, y, 10.0, 1e-4, 100_000)
            assert np.array_equal(a1, a2)
            assert b1 == b2
            assert g1 == g2
            assert i1 == i2

    def test_equality_constraint_held(self):
        rng = np.random.default_rng(14)
        K, y = _random_problem(rng, 20, 4, separable=False)
        alpha, _, gap, _ = _numpy.smo_solve(K, y, 1.0, 1e-4, 100_000)
        assert abs(float(alpha @ y)) < 1e-9
        assert np.all(alpha >= 0.0) and np.all(alpha <= 1.0)
        assert gap <= 1e-4


class TestBackendSelection:
    @pytest.mark.parametrize("backend", ["numba", "numpy"])
    def test_env_flag(self, backend):
        code = "import dsk._kernels as k; print(k.BACKEND)"
        env = dict(os.environ, DSK_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == backend

    def test_bad_flag_rejected(self):
        code = "import dsk._kernels"
        env = dict(os.environ, DSK_BACKEND="fortran")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode != 0
