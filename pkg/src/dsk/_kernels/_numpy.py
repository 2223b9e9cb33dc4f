"""Pure-numpy reference implementations of the hot kernels.

These must stay behaviorally identical to the numba versions in
``_numba.py``: the test suite asserts exact agreement between backends.
"""

import numpy as np


def levenshtein_matrix(ref: np.ndarray, hyp: np.ndarray) -> np.ndarray:
    """Full unit-cost edit-distance DP matrix for two int token arrays.

    Row recurrence is vectorized; the left-to-right dependency
    d[i,j] = min(cand[j], d[i,j-1]+1) is folded with the running-min
    identity d[i,j] = j + min over k<=j of (cand[k] - k).
    """
    n = int(ref.shape[0])
    m = int(hyp.shape[0])
    d = np.empty((n + 1, m + 1), dtype=np.int32)
    d[0, :] = np.arange(m + 1, dtype=np.int32)
    if m == 0:
        d[:, 0] = np.arange(n + 1, dtype=np.int32)
        return d
    js = np.arange(1, m + 1, dtype=np.int32)
    for i in range(1, n + 1):
        cost = (hyp != ref[i - 1]).astype(np.int32)
        cand = np.minimum(d[i - 1, :-1] + cost, d[i - 1, 1:] + 1)
        run = np.minimum.accumulate(np.concatenate(([np.int32(i)], cand - js)))
        d[i, 0] = i
        d[i, 1:] = run[1:] + js
    return d


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, float, int]:
    """Soft-margin SVM dual via SMO on the maximal violating pair.

    K is the kernel Gram matrix, y in {-1,+1}. Returns (alpha, bias,
    final KKT gap, iterations). The pair selection and the step are the
    textbook violating-pair scheme; bounds are snapped exactly so the
    index-set membership tests stay exact comparisons.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 0.5 a'Qa - e'a at alpha = 0
    it = 0
    gap = np.inf
    while it < max_iter:
        m_vals = -y * G
        up = np.where(
            ((y > 0.0) & (alpha < C)) | ((y < 0.0) & (alpha > 0.0)),
            m_vals,
            -np.inf,
        )
        low = np.where(
            ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < C)),
            m_vals,
            np.inf,
        )
        i = int(np.argmax(up))
        j = int(np.argmin(low))
        gmax = up[i]
        gmin = low[j]
        gap = gmax - gmin
        if not np.isfinite(gap) or gap <= tol:
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

        G += (lam * y) * (K[:, i] - K[:, j])
        it += 1

    if not np.isfinite(gap):
        b = 0.0
    else:
        b = float((gmax + gmin) / 2.0)
    return alpha, b, float(gap), it
