"""Recursive feature elimination ranked by linear-SVM weight magnitude."""

from __future__ import annotations

import numpy as np

from dsk.classifiers.svm import SvmClassifier
from dsk.errors import ModelError


def rfe_rank(X: np.ndarray, y01: np.ndarray, C: float = 1.0) -> np.ndarray:
    """Rank features by repeatedly dropping the smallest-|weight| one.

    X must already be standardized. Returns feature indices ordered from
    most important (the survivor) to least (first eliminated). Weight
    ties eliminate the lower feature index first.
    """
    X = np.asarray(X, dtype=np.float64)
    y01 = np.asarray(y01)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ModelError("rfe_rank needs a 2-D matrix with >= 1 feature")
    if np.unique(y01).size < 2:
        raise ModelError("rfe_rank needs both classes present")

    active = list(range(X.shape[1]))
    eliminated: list[int] = []
    while len(active) > 1:
        model = SvmClassifier(C=C, kernel="linear").fit(X[:, active], y01)
        weights = np.abs(model.linear_weights)
        drop = int(np.argmin(weights))  # first minimum = lowest index
        eliminated.append(active.pop(drop))
    ranking = [active[0]] + eliminated[::-1]
    return np.asarray(ranking, dtype=np.int64)
