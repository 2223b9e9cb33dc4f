"""k-nearest-neighbour classifier with fully deterministic tie handling.

Neighbours are the first k rows under (distance, index) ordering. The
predicted label is the majority among them; a vote tie goes to the class
with the smaller summed distance, and a remaining tie to label 0.
"""

from __future__ import annotations

import numpy as np

from dsk.errors import ModelError


class KnnClassifier:
    def __init__(self, k: int = 1):
        if k < 1:
            raise ModelError("k must be >= 1")
        self.k = int(k)

    def fit(self, X: np.ndarray, y01: np.ndarray) -> "KnnClassifier":
        X = np.asarray(X, dtype=np.float64)
        y01 = np.asarray(y01, dtype=np.int64)
        if self.k > X.shape[0]:
            raise ModelError(f"k={self.k} exceeds {X.shape[0]} training rows")
        self._X = X
        self._y = y01
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)
        n = self._X.shape[0]
        idx = np.arange(n)
        for r in range(X.shape[0]):
            diff = self._X - X[r]
            dist = np.sqrt((diff * diff).sum(axis=1))
            order = np.lexsort((idx, dist))[: self.k]
            labels = self._y[order]
            d = dist[order]
            votes1 = int((labels == 1).sum())
            votes0 = self.k - votes1
            if votes1 != votes0:
                out[r] = 1 if votes1 > votes0 else 0
            else:
                sum1 = float(d[labels == 1].sum())
                sum0 = float(d[labels == 0].sum())
                out[r] = 1 if sum1 < sum0 else 0
        return out
