"""Classical feature extraction and standardization.

Dictionary features are per-category word percentages; structural
features are WC and Sixltr plus, when punctuation is analysed, the
12-feature punctuation block; pause features copy PauseStats verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dsk.alignment import PauseStats
from dsk.errors import FeatureError
from dsk.lexicon import CategoryLexicon

FeatureVector = dict[str, float]

# The 12-feature punctuation block, each expressed as percent of WC.
PUNCT_FEATURES: tuple[tuple[str, str], ...] = (
    ("Period", "."),
    ("Comma", ","),
    ("Colon", ":"),
    ("SemiColon", ";"),
    ("QuestionMark", "?"),
    ("Exclamation", "!"),
    ("Dash", "-–—"),
    ("Quote", '"“”'),
    ("Apostrophe", "'’"),
    ("Parenthesis", "()"),
)
_CLASSIFIED = set("".join(chars for _, chars in PUNCT_FEATURES))


def dictionary_percentages(
    tokens: list[str], lexicon: CategoryLexicon
) -> FeatureVector:
    """Percent of tokens matching each category; multi-category tokens
    count once per category. Empty input yields all zeros."""
    counts = {cat_id: 0 for cat_id, _ in lexicon.categories}
    for tok in tokens:
        for cat_id in lexicon.match(tok):
            counts[cat_id] += 1
    total = len(tokens)
    return {
        name: (100.0 * counts[cat_id] / total if total else 0.0)
        for cat_id, name in lexicon.categories
    }


def _letters(token: str) -> int:
    return sum(1 for c in token if c.isalpha())


def structural_features(
    tokens: list[str],
    rendered_text_with_punct: str = "",
    include_punct: bool = False,
) -> FeatureVector:
    """WC and Sixltr always; the punctuation block when requested.

    Punctuation is counted character-wise over the rendered text and
    normalized by WC, so the caller must never pass pause-encoded text
    here (pause marks are not punctuation).
    """
    wc = len(tokens)
    sixltr = 100.0 * sum(1 for t in tokens if _letters(t) >= 6) / wc if wc else 0.0
    feats: FeatureVector = {"WC": float(wc), "Sixltr": sixltr}
    if include_punct:
        text = rendered_text_with_punct
        counts = {name: 0 for name, _ in PUNCT_FEATURES}
        other = 0
        total = 0
        for ch in text:
            if ch.isalnum() or ch.isspace():
                continue
            total += 1
            for name, chars in PUNCT_FEATURES:
                if ch in chars:
                    counts[name] += 1
                    break
            else:
                other += 1
        scale = 100.0 / wc if wc else 0.0
        feats["AllPunc"] = total * scale
        for name, _ in PUNCT_FEATURES:
            feats[name] = counts[name] * scale
        feats["OtherPunct"] = other * scale
    return feats


def pause_feature_block(stats: PauseStats) -> FeatureVector:
    return {
        "speech_rate": stats.speech_rate,
        "n_pauses": float(stats.n_pauses),
        "mean_pause": stats.mean_pause,
        "total_pause": stats.total_pause,
    }


@dataclass(frozen=True)
class FeatureMatrix:
    """Named feature columns over identified rows."""

    ids: tuple[str, ...]
    names: tuple[str, ...]
    values: np.ndarray  # (n_samples, n_features) float64

    def __post_init__(self):
        if self.values.shape != (len(self.ids), len(self.names)):
            raise FeatureError(
                f"matrix shape {self.values.shape} does not match "
                f"{len(self.ids)} ids x {len(self.names)} names"
            )
        if self.values.size and not np.isfinite(self.values).all():
            raise FeatureError("feature values must be finite")

    def select(self, columns: list[int]) -> "FeatureMatrix":
        return FeatureMatrix(
            self.ids,
            tuple(self.names[c] for c in columns),
            self.values[:, columns],
        )

    def rows(self, indices: list[int]) -> "FeatureMatrix":
        return FeatureMatrix(
            tuple(self.ids[i] for i in indices),
            self.names,
            self.values[indices, :],
        )


def matrix_from_vectors(ids: list[str], vectors: list[FeatureVector]) -> FeatureMatrix:
    """Stack per-sample feature dicts; all rows must share the same keys."""
    if not vectors:
        return FeatureMatrix((), (), np.zeros((0, 0)))
    names = list(vectors[0])
    for idx, vec in enumerate(vectors):
        if list(vec) != names:
            raise FeatureError(f"row {ids[idx]!r} has mismatched feature names")
    values = np.array([[v[name] for name in names] for v in vectors], dtype=np.float64)
    return FeatureMatrix(tuple(ids), tuple(names), values)


@dataclass(frozen=True)
class Standardizer:
    names: tuple[str, ...]
    mean: np.ndarray
    scale: np.ndarray  # population std, 1.0 for constant columns


def fit_standardizer(train: FeatureMatrix) -> Standardizer:
    if len(train.ids) < 2:
        raise FeatureError("standardizer needs at least 2 rows")
    mean = train.values.mean(axis=0)
    std = train.values.std(axis=0)  # population std
    scale = np.where(std == 0.0, 1.0, std)
    return Standardizer(train.names, mean, scale)


def apply_standardizer(std: Standardizer, m: FeatureMatrix) -> FeatureMatrix:
    if m.names != std.names:
        raise FeatureError("feature names do not match the fitted standardizer")
    return FeatureMatrix(m.ids, m.names, (m.values - std.mean) / std.scale)


def invert_standardizer(std: Standardizer, m: FeatureMatrix) -> FeatureMatrix:
    if m.names != std.names:
        raise FeatureError("feature names do not match the fitted standardizer")
    return FeatureMatrix(m.ids, m.names, m.values * std.scale + std.mean)


# --- CSV io (deterministic: floats via repr) ----------------------------


def write_features_csv(matrix: FeatureMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(("id",) + matrix.names) + "\n")
        for i, sample_id in enumerate(matrix.ids):
            row = ",".join(repr(float(v)) for v in matrix.values[i])
            fh.write(f"{sample_id},{row}\n")


def read_features_csv(path) -> FeatureMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise FeatureError(f"empty features file {path}")
    header = lines[0].split(",")
    if header[:1] != ["id"]:
        raise FeatureError("features CSV must start with an 'id' column")
    names = tuple(header[1:])
    ids = []
    rows = []
    for ln in lines[1:]:
        fields = ln.split(",")
        if len(fields) != len(names) + 1:
            raise FeatureError(f"bad features row: {ln!r}")
        ids.append(fields[0])
        rows.append([float(x) for x in fields[1:]])
    values = np.array(rows, dtype=np.float64) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(tuple(ids), names, values)
