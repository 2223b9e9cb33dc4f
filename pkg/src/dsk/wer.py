"""Word Error Rate scoring with per-group aggregation.

The DP fill runs on the selected kernel backend; the backtrace and all
aggregation are plain Python. WER = (S + D + I) / len(ref).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from dsk import _kernels

# Characters removed before scoring. The ellipsis is included so
# pause-encoded text can be scored after mark removal.
SCORING_STRIP_CHARS = ".,?!…;:\"'()-"

# Filler surfaces dropped by default in corpus scoring (CLI --keep-fillers
# retains them); manual transcripts keep fillers, ASR output mostly lacks
# them, so dropping gives the fairer default comparison.
FILLER_TOKENS = frozenset(
    ["uh", "um", "uhm", "er", "erm", "em", "eh", "ah", "mm", "hm", "hmm", "mhm"]
)

_STRIP_TABLE = {ord(c): None for c in SCORING_STRIP_CHARS}


def normalize_for_scoring(text: str) -> list[str]:
    """Lowercase, strip punctuation characters, whitespace-tokenize."""
    cleaned = text.lower().translate(_STRIP_TABLE)
    return cleaned.split()


def drop_fillers(tokens: list[str]) -> list[str]:
    return [t for t in tokens if t not in FILLER_TOKENS]


@dataclass(frozen=True)
class EditSummary:
    """Counts from a minimal edit alignment of hyp against ref."""

    substitutions: int
    deletions: int
    insertions: int
    ref_len: int
    op_trace: tuple[tuple[str, str | None, str | None], ...]

    @property
    def wer(self) -> float:
        if self.ref_len == 0:
            return 0.0 if self.total_edits == 0 else math.inf
        return self.total_edits / self.ref_len

    @property
    def total_edits(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def replay(self) -> list[str]:
        """Apply the trace to ref, reproducing hyp."""
        out = []
        for op, _, hyp_tok in self.op_trace:
            if op in ("match", "sub", "ins"):
                out.append(hyp_tok)
        return out


def _encode(ref: list[str], hyp: list[str]) -> tuple[np.ndarray, np.ndarray]:
    ids: dict[str, int] = {}
    for tok in ref:
        ids.setdefault(tok, len(ids))
    for tok in hyp:
        ids.setdefault(tok, len(ids))
    r = np.fromiter((ids[t] for t in ref), dtype=np.int64, count=len(ref))
    h = np.fromiter((ids[t] for t in hyp), dtype=np.int64, count=len(hyp))
    return r, h


def align_edit(ref: list[str], hyp: list[str]) -> EditSummary:
    """Minimal unit-cost edit alignment.

    Backtrace ties prefer substitution over insertion over deletion.
    """
    r, h = _encode(ref, hyp)
    d = _kernels.levenshtein_matrix(r, h)

    trace: list[tuple[str, str | None, str | None]] = []
    subs = dels = ins = 0
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = d[i, j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and d[i - 1, j - 1] == here:
            trace.append(("match", ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and d[i - 1, j - 1] + 1 == here:
            trace.append(("sub", ref[i - 1], hyp[j - 1]))
            subs += 1
            i -= 1
            j -= 1
        elif j > 0 and d[i, j - 1] + 1 == here:
            trace.append(("ins", None, hyp[j - 1]))
            ins += 1
            j -= 1
        else:
            trace.append(("del", ref[i - 1], None))
            dels += 1
            i -= 1
    trace.reverse()
    return EditSummary(subs, dels, ins, len(ref), tuple(trace))


@dataclass
class GroupStats:
    mean: float
    std: float
    n: int


@dataclass
class CorpusWerResult:
    """Per-sample WER percentages plus per-group and overall mean/std."""

    per_sample: list[tuple[str, str, float]] = field(default_factory=list)
    by_group: dict[str, GroupStats] = field(default_factory=dict)
    overall: GroupStats | None = None
    errors: list[tuple[str, str]] = field(default_factory=list)


def _mean_std(values: list[float]) -> GroupStats:
    if not values:
        return GroupStats(math.nan, math.nan, 0)
    arr = np.asarray(values, dtype=np.float64)
    # population std: descriptive statistic over the fixed sample set
    return GroupStats(float(arr.mean()), float(arr.std()), len(values))


def corpus_wer(
    pairs: list[tuple[list[str], list[str], str]],
    ids: list[str] | None = None,
) -> CorpusWerResult:
    """Score (ref_tokens, hyp_tokens, group) pairs; WER reported in percent.

    Samples with an empty reference are excluded and recorded in
    ``errors`` instead of poisoning the aggregate.
    """
    result = CorpusWerResult()
    values: dict[str, list[float]] = {}
    all_values: list[float] = []
    for idx, (ref, hyp, group) in enumerate(pairs):
        sample_id = ids[idx] if ids is not None else str(idx)
        if len(ref) == 0:
            result.errors.append((sample_id, "empty reference after normalization"))
            continue
        wer_pct = align_edit(ref, hyp).wer * 100.0
        result.per_sample.append((sample_id, group, wer_pct))
        values.setdefault(group, []).append(wer_pct)
        all_values.append(wer_pct)
    for group in sorted(values):
        result.by_group[group] = _mean_std(values[group])
    result.overall = _mean_std(all_values)
    return result
