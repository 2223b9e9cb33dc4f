"""Hyper-parameter and feature-count selection via leave-one-subject-out CV.

Every tie is broken deterministically: candidates sort by CV accuracy
(descending), then fewer features, then family order (svm before knn),
then grid position.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from dsk.classifiers.knn import KnnClassifier
from dsk.classifiers.svm import SvmClassifier
from dsk.errors import ModelError
from dsk.features import FeatureMatrix, apply_standardizer, fit_standardizer

log = logging.getLogger(__name__)

_FAMILY_ORDER = {"svm": 0, "knn": 1}


@dataclass(frozen=True)
class ModelSpec:
    family: str  # svm | knn
    kernel: str = "linear"  # svm only
    C: float = 1.0  # svm only
    gamma: float | None = None  # svm rbf only
    k: int | None = None  # knn only

    def __post_init__(self):
        if self.family == "svm":
            if self.C <= 0:
                raise ModelError("svm C must be positive")
            if self.kernel not in ("linear", "rbf"):
                raise ModelError(f"unknown svm kernel {self.kernel!r}")
            if self.kernel == "rbf" and (self.gamma is None or self.gamma <= 0):
                raise ModelError("rbf kernel needs positive gamma")
        elif self.family == "knn":
            if self.k is None or self.k < 1 or self.k % 2 == 0:
                raise ModelError("knn k must be an odd integer >= 1")
        else:
            raise ModelError(f"unknown model family {self.family!r}")

    def describe(self) -> str:
        if self.family == "svm":
            if self.kernel == "rbf":
                return f"svm(kernel=rbf, C={self.C:g}, gamma={self.gamma:g})"
            return f"svm(kernel=linear, C={self.C:g})"
        return f"knn(k={self.k})"


@dataclass(frozen=True)
class LabeledDataset:
    matrix: FeatureMatrix
    y: np.ndarray  # 1 = AD, 0 = HC
    subject_ids: tuple[str, ...]

    def __post_init__(self):
        n = len(self.matrix.ids)
        if len(self.y) != n or len(self.subject_ids) != n:
            raise ModelError("labels/subjects must match the matrix rows")
        if len(set(self.subject_ids)) != n:
            raise ModelError("subject ids must be unique (one sample per subject)")


def train(X: np.ndarray, y01: np.ndarray, spec: ModelSpec):
    """Fit one model per its spec; X must already be standardized."""
    if spec.family == "svm":
        gamma = spec.gamma if spec.gamma is not None else 0.1
        return SvmClassifier(C=spec.C, kernel=spec.kernel, gamma=gamma).fit(X, y01)
    return KnnClassifier(k=spec.k).fit(X, y01)


@dataclass
class FoldRecord:
    subject_id: str
    correct: bool
    flagged: bool  # single-class training fold fell back to majority vote
    scaler_mean: np.ndarray | None
    scaler_scale: np.ndarray | None


@dataclass
class LosoResult:
    accuracy: float
    folds: list[FoldRecord]


def loso_cv_detail(
    data: LabeledDataset, spec: ModelSpec, refit_scaler: bool = True
) -> LosoResult:
    """One fold per subject; the held-out subject is predicted by a model
    trained (and, by default, re-standardized) on everyone else."""
    n = len(data.subject_ids)
    if n < 2:
        raise ModelError("LOSO needs at least 2 subjects")
    folds: list[FoldRecord] = []
    correct = 0
    values = data.matrix.values
    for i in range(n):
        train_idx = [j for j in range(n) if j != i]
        y_train = data.y[train_idx]
        if np.unique(y_train).size < 2:
            majority = int(np.bincount(y_train, minlength=2).argmax())
            ok = majority == int(data.y[i])
            log.warning(
                "LOSO fold %s: single-class training set, predicting majority %d",
                data.subject_ids[i],
                majority,
            )
            folds.append(FoldRecord(data.subject_ids[i], ok, True, None, None))
            correct += int(ok)
            continue
        X_train = values[train_idx]
        X_test = values[i: i + 1]
        mean = scale = None
        if refit_scaler:
            fold_matrix = data.matrix.rows(train_idx)
            scaler = fit_standardizer(fold_matrix)
            X_train = apply_standardizer(scaler, fold_matrix).values
            X_test = (X_test - scaler.mean) / scaler.scale
            mean, scale = scaler.mean, scaler.scale
        model = train(X_train, y_train, spec)
        pred = int(model.predict(X_test)[0])
        ok = pred == int(data.y[i])
        folds.append(FoldRecord(data.subject_ids[i], ok, False, mean, scale))
        correct += int(ok)
    return LosoResult(correct / n, folds)


def loso_cv(data: LabeledDataset, spec: ModelSpec, refit_scaler: bool = True) -> float:
    return loso_cv_detail(data, spec, refit_scaler).accuracy


def default_grid(n_features: int) -> list[ModelSpec]:
    """The documented default search grid (config-overridable, not the
    paper's undisclosed one)."""
    specs: list[ModelSpec] = []
    for C in (0.1, 1.0, 10.0, 100.0):
        specs.append(ModelSpec("svm", kernel="linear", C=C))
    for C in (0.1, 1.0, 10.0, 100.0):
        for gamma in (1.0 / max(1, n_features), 0.01, 0.1):
            specs.append(ModelSpec("svm", kernel="rbf", C=C, gamma=gamma))
    for k in (1, 3, 5, 7, 9):
        specs.append(ModelSpec("knn", k=k))
    return specs


def grid_from_config(cfg: dict, n_features: int) -> list[ModelSpec]:
    """Materialize a grid.conf dict; gamma value "scale" means 1/n_features."""
    specs: list[ModelSpec] = []
    svm_cfg = cfg.get("svm", {})
    kernels = svm_cfg.get("kernel", ["linear", "rbf"])
    cs = svm_cfg.get("C", [1.0])
    gammas = svm_cfg.get("gamma", ["scale"])
    if "linear" in kernels:
        for C in cs:
            specs.append(ModelSpec("svm", kernel="linear", C=float(C)))
    if "rbf" in kernels:
        for C in cs:
            for gamma in gammas:
                value = 1.0 / max(1, n_features) if gamma == "scale" else float(gamma)
                specs.append(ModelSpec("svm", kernel="rbf", C=float(C), gamma=value))
    for k in cfg.get("knn", {}).get("k", []):
        specs.append(ModelSpec("knn", k=int(k)))
    return specs


@dataclass
class SelectionResult:
    spec: ModelSpec
    n_features: int
    cv_accuracy: float
    feature_indices: list[int]
    trace: list[tuple[int, str, float]] = field(default_factory=list)


def select_model(
    data: LabeledDataset,
    ranking: np.ndarray,
    grid: list[ModelSpec],
    refit_scaler: bool = True,
) -> SelectionResult:
    """Search feature count x grid by LOSO accuracy.

    For each N from all features down to 1, the matrix is restricted to
    the top-N ranked features and every grid spec is cross-validated.
    """
    if not grid:
        raise ModelError("empty hyperparameter grid")
    d = len(ranking)
    if sorted(ranking.tolist()) != list(range(d)) or d != len(data.matrix.names):
        raise ModelError("ranking must be a permutation of the feature indices")

    candidates = []  # (-acc, N, family_rank, grid_idx, spec, columns)
    trace: list[tuple[int, str, float]] = []
    for N in range(d, 0, -1):
        columns = [int(c) for c in ranking[:N]]
        restricted = LabeledDataset(
            data.matrix.select(columns), data.y, data.subject_ids
        )
        for g_idx, spec in enumerate(grid):
            if spec.family == "knn" and spec.k > len(data.subject_ids) - 1:
                continue  # k cannot exceed the fold training size
            acc = loso_cv(restricted, spec, refit_scaler)
            trace.append((N, spec.describe(), acc))
            candidates.append(
                (-acc, N, _FAMILY_ORDER[spec.family], g_idx, spec, columns)
            )
    if not candidates:
        raise ModelError("no feasible grid point for this dataset")
    candidates.sort(key=lambda c: c[:4])
    neg_acc, N, _, _, spec, columns = candidates[0]
    result = SelectionResult(spec, N, -neg_acc, columns, trace)
    log.info(
        "selected %s with N=%d features (LOSO accuracy %.4f)",
        spec.describe(),
        N,
        result.cv_accuracy,
    )
    return result
