"""Binary classification metrics; the positive class is AD (label 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dsk.errors import ModelError


@dataclass(frozen=True)
class EvalMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    precision: float
    recall: float
    f1: float


def evaluate(pred, truth) -> EvalMetrics:
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape:
        raise ModelError(f"length mismatch: {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ModelError("cannot evaluate an empty prediction set")
    tp = int(((pred == 1) & (truth == 1)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    tn = int(((pred == 0) & (truth == 0)).sum())
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if tp else 0.0
    return EvalMetrics(tp, fp, fn, tn, accuracy, precision, recall, f1)
