"""Model bundle serialization: family, params, selected features, learned
state and the fitted standardizer, as versioned JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from dsk.classifiers.knn import KnnClassifier
from dsk.classifiers.selection import ModelSpec
from dsk.classifiers.svm import SvmClassifier
from dsk.errors import ModelError
from dsk.features import FeatureMatrix, Standardizer, apply_standardizer

FORMAT_VERSION = 1


@dataclass
class ModelBundle:
    """Everything needed to score raw feature rows."""

    spec: ModelSpec
    feature_names: tuple[str, ...]  # selected features, rank order
    standardizer: Standardizer  # fitted on all training features
    model: SvmClassifier | KnnClassifier

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        if matrix.names != self.standardizer.names:
            raise ModelError("feature columns do not match the trained model")
        scaled = apply_standardizer(self.standardizer, matrix)
        cols = [scaled.names.index(name) for name in self.feature_names]
        return self.model.predict(scaled.values[:, cols])


def save_model(bundle: ModelBundle, path) -> None:
    spec = bundle.spec
    payload = {
        "format_version": FORMAT_VERSION,
        "family": spec.family,
        "params": {
            "kernel": spec.kernel,
            "C": spec.C,
            "gamma": spec.gamma,
            "k": spec.k,
        },
        "feature_names": list(bundle.feature_names),
        "standardizer": {
            "names": list(bundle.standardizer.names),
            "mean": bundle.standardizer.mean.tolist(),
            "scale": bundle.standardizer.scale.tolist(),
        },
    }
    if spec.family == "svm":
        m = bundle.model
        payload["svm"] = {
            "support_vectors": m._X.tolist(),
            "dual_coef": m.dual_coef_.tolist(),
            "intercept": m.intercept_,
        }
    else:
        m = bundle.model
        payload["knn"] = {"X": m._X.tolist(), "y": m._y.tolist()}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {version!r}")
    params = payload["params"]
    spec = ModelSpec(
        family=payload["family"],
        kernel=params["kernel"],
        C=params["C"],
        gamma=params["gamma"],
        k=params["k"],
    )
    std = Standardizer(
        names=tuple(payload["standardizer"]["names"]),
        mean=np.asarray(payload["standardizer"]["mean"], dtype=np.float64),
        scale=np.asarray(payload["standardizer"]["scale"], dtype=np.float64),
    )
    if spec.family == "svm":
        blob = payload["svm"]
        model = SvmClassifier(
            C=spec.C,
            kernel=spec.kernel,
            gamma=spec.gamma if spec.gamma is not None else 0.1,
        )
        model._X = np.asarray(blob["support_vectors"], dtype=np.float64)
        model.dual_coef_ = np.asarray(blob["dual_coef"], dtype=np.float64)
        model.intercept_ = float(blob["intercept"])
    else:
        blob = payload["knn"]
        model = KnnClassifier(k=spec.k)
        model._X = np.asarray(blob["X"], dtype=np.float64)
        model._y = np.asarray(blob["y"], dtype=np.int64)
    return ModelBundle(spec, tuple(payload["feature_names"]), std, model)
