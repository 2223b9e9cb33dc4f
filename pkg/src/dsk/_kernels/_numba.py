"""Numba-compiled kernels. Mirrors ``_numpy.py`` exactly; keep in sync."""

import numpy as np
from numba import njit


@njit(cache=True)
def levenshtein_matrix(ref: np.ndarray, hyp: np.ndarray) -> np.ndarray:
    n = ref.shape[0]
    m = hyp.shape[0]
    d = np.empty((n + 1, m + 1), dtype=np.int32)
    for j in range(m + 1):
        d[0, j] = j
    for i in range(1, n + 1):
        d[i, 0] = i
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            best = d[i - 1, j - 1] + cost
            b = d[i, j - 1] + 1
            if b < best:
                best = b
            c = d[i - 1, j] + 1
            if c < best:
                best = c
            d[i, j] = best
    return d


@njit(cache=True)
def smo_solve(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    it = 0
    gap = np.inf
    gmax = np.inf
    gmin = -np.inf
    while it < max_iter:
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            v = -y[t] * G[t]
            if (y[t] > 0.0 and alpha[t] < C) or (y[t] < 0.0 and alpha[t] > 0.0):
                if v > gmax:
                    gmax = v
                    i = t
            if (y[t] > 0.0 and alpha[t] > 0.0) or (y[t] < 0.0 and alpha[t] < C):
                if v < gmin:
                    gmin = v
                    j = t
        gap = gmax - gmin
        if i < 0 or j < 0 or not np.isfinite(gap) or gap <= tol:
            break

        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = 1e-12
        lam = gap / quad
        cap_i = (C - alpha[i]) if y[i] > 0.0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0.0 else (C - alpha[j])
        if cap_i < lam:
            lam = cap_i
        if cap_j < lam:
            lam = cap_j

        alpha[i] += y[i] * lam
        alpha[j] -= y[j] * lam
        if lam == cap_i:
            alpha[i] = C if y[i] > 0.0 else 0.0
        if lam == cap_j:
            alpha[j] = 0.0 if y[j] > 0.0 else C

        for t in range(n):
            G[t] += (lam * y[t]) * (K[t, i] - K[t, j])
        it += 1

    if not np.isfinite(gap):
        b = 0.0
    else:
        b = (gmax + gmin) / 2.0
    return alpha, b, gap, it
