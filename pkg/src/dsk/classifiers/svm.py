"""Binary soft-margin SVM trained by SMO (see dsk._kernels).

Labels are {0, 1} externally and {-1, +1} internally. The solver runs to
an internal working-set gap of 1e-4, well inside the 1e-3 KKT tolerance
the trained model must satisfy.
"""

from __future__ import annotations

import numpy as np

from dsk import _kernels
from dsk.errors import ModelError

DEFAULT_TOL = 1e-4


def _kernel_matrix(kind: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise ModelError(f"unknown kernel {kind!r}")


class SvmClassifier:
    def __init__(
        self,
        C: float = 1.0,
        kernel: str = "linear",
        gamma: float = 0.1,
        tol: float = DEFAULT_TOL,
        max_iter: int = 200_000,
    ):
        if C <= 0:
            raise ModelError("C must be positive")
        if kernel == "rbf" and gamma <= 0:
            raise ModelError("gamma must be positive")
        if kernel not in ("linear", "rbf"):
            raise ModelError(f"unknown kernel {kernel!r}")
        self.C = float(C)
        self.kernel = kernel
        self.gamma = float(gamma)
        self.tol = tol
        self.max_iter = max_iter
        self._X: np.ndarray | None = None

    def fit(self, X: np.ndarray, y01: np.ndarray) -> "SvmClassifier":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y01 = np.asarray(y01)
        classes = np.unique(y01)
        if classes.size < 2:
            raise ModelError("training data contains a single class")
        y = np.where(y01 > 0, 1.0, -1.0)
        K = _kernel_matrix(self.kernel, self.gamma, X, X)
        alpha, b, gap, iters = _kernels.smo_solve(
            K, y, self.C, self.tol, self.max_iter
        )
        self._X = X
        self._y = y
        self.alpha_ = alpha
        self.dual_coef_ = alpha * y
        self.intercept_ = float(b)
        self.gap_ = float(gap)
        self.iterations_ = int(iters)
        return self

    @property
    def linear_weights(self) -> np.ndarray:
        """Primal weights; only meaningful for the linear kernel."""
        if self.kernel != "linear":
            raise ModelError("primal weights exist only for the linear kernel")
        return self.dual_coef_ @ self._X

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        K = _kernel_matrix(self.kernel, self.gamma, X, self._X)
        return K @ self.dual_coef_ + self.intercept_

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0.0).astype(np.int64)

    def kkt_residual(self) -> float:
        """Worst KKT violation of the fitted dual solution.

        Free vectors must sit on the margin; zero alphas outside it;
        bound alphas inside or on it.
        """
        margins = self._y * self.decision_function(self._X)
        resid = 0.0
        for a, m in zip(self.alpha_, margins):
            if a <= 1e-9:
                resid = max(resid, max(0.0, 1.0 - m))
            elif a >= self.C - 1e-9:
                resid = max(resid, max(0.0, m - 1.0))
            else:
                resid = max(resid, abs(m - 1.0))
        return float(resid)
