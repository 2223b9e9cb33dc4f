"""Model training, ranking, selection and evaluation."""

from dsk.classifiers.knn import KnnClassifier
from dsk.classifiers.metrics import EvalMetrics, evaluate
from dsk.classifiers.rfe import rfe_rank
from dsk.classifiers.selection import (
    LabeledDataset,
    ModelSpec,
    SelectionResult,
    default_grid,
    loso_cv,
    loso_cv_detail,
    select_model,
    train,
)
from dsk.classifiers.svm import SvmClassifier

__all__ = [
    "EvalMetrics",
    "KnnClassifier",
    "LabeledDataset",
    "ModelSpec",
    "SelectionResult",
    "SvmClassifier",
    "default_grid",
    "evaluate",
    "loso_cv",
    "loso_cv_detail",
    "rfe_rank",
    "select_model",
    "train",
]
