"""Synthetic desk-scale fixture corpora.

``pause-signal`` mode gives both classes the same vocabulary distribution
but disjoint inter-word gap ranges (AD-like uniform(0.6, 2.5) s, HC-like
uniform(0.05, 0.4) s), so only pause-derived features separate them.
``lexical-signal`` mode uses disjoint word pools with shared gap
statistics, so dictionary features separate perfectly instead.
Everything written is a deterministic function of the seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

# word pools; pool "a" and pool "b" back the lexical signal
_POOL_A = [
    "cookie", "window", "curtain", "kitchen", "counter", "garden",
    "cupboard", "ladder", "dishes", "basket",
]
_POOL_B = [
    "running", "falling", "washing", "reaching", "standing", "laughing",
    "spilling", "climbing", "drying", "pointing",
]
_COMMON = [
    "the", "a", "and", "is", "on", "in", "she", "he", "boy", "girl",
    "water", "mother", "uh", "there", "little", "over", "here", "that",
]

_CATEGORIES = (
    (1, "objects", _POOL_A),
    (2, "actions", _POOL_B),
)


def _lexicon_text() -> str:
    lines = ["%"]
    for cat_id, name, _ in _CATEGORIES:
        lines.append(f"{cat_id}\t{name}")
    lines.append("%")
    for cat_id, _, words in _CATEGORIES:
        for w in sorted(words):
            lines.append(f"{w}\t{cat_id}")
    return "\n".join(lines) + "\n"


def _draw_words(rng: np.random.Generator, n: int, mode: str, group: str) -> list[str]:
    if mode == "lexical-signal":
        pool = _POOL_A + _COMMON[:9] if group == "AD" else _POOL_B + _COMMON[9:]
    else:
        pool = _POOL_A + _POOL_B + _COMMON
    idx = rng.integers(0, len(pool), size=n)
    return [pool[i] for i in idx]


def _draw_gaps(rng: np.random.Generator, n: int, mode: str, group: str) -> np.ndarray:
    if mode == "pause-signal":
        lo, hi = (0.6, 2.5) if group == "AD" else (0.05, 0.4)
    else:
        lo, hi = 0.1, 0.8
    return rng.uniform(lo, hi, size=n)


def _sentences(words: list[str], rng: np.random.Generator) -> list[list[str]]:
    out = []
    i = 0
    while i < len(words):
        k = int(rng.integers(6, 13))
        out.append(words[i: i + k])
        i += k
    return out


def synthesize_fixture(
    seed: int,
    n_per_class: int,
    mode: str,
    out_dir,
    n_test_per_class: int | None = None,
) -> Path:
    """Write a corpus + manifest under out_dir; returns the manifest path."""
    if mode not in ("pause-signal", "lexical-signal"):
        raise ValueError(f"unknown fixture mode {mode!r}")
    if n_per_class < 2:
        raise ValueError("n_per_class must be >= 2")
    if n_test_per_class is None:
        n_test_per_class = max(1, n_per_class // 2)

    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    for sub in ("cha", "asr", "align"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    samples = []
    vocab: set[str] = set()
    for group in ("AD", "HC"):
        total = n_per_class + n_test_per_class
        for i in range(total):
            split = "train" if i < n_per_class else "test"
            sid = f"{group.lower()}{i + 1:03d}"
            n_words = int(rng.integers(25, 46))
            words = _draw_words(rng, n_words, mode, group)
            vocab.update(w.lower() for w in words)
            gaps = _draw_gaps(rng, n_words - 1, mode, group)
            durations = rng.uniform(0.15, 0.45, size=n_words)
            start = round(float(rng.uniform(0.2, 0.8)), 3)
            starts, ends = [], []
            for w_idx in range(n_words):
                starts.append(round(start, 3))
                start += durations[w_idx]
                ends.append(round(start, 3))
                if w_idx < n_words - 1:
                    start += gaps[w_idx]
            duration = round(ends[-1] + float(rng.uniform(0.5, 1.5)), 3)

            sentences = _sentences(words, rng)

            cha_lines = [
                "@Begin",
                "@Languages:\teng",
                "@Participants:\tPAR Participant, INV Investigator",
                "*INV:\tokay .",
            ]
            for sent in sentences:
                cha_lines.append("*PAR:\t" + " ".join(sent) + " .")
            cha_lines.append("@End")
            (out / "cha" / f"{sid}.cha").write_text(
                "\n".join(cha_lines) + "\n", encoding="utf-8"
            )

            asr_sents = [
                " ".join([sent[0].capitalize()] + sent[1:]) + "." for sent in sentences
            ]
            (out / "asr" / f"{sid}.txt").write_text(
                " ".join(asr_sents) + "\n", encoding="utf-8"
            )

            ctm_lines = [
                f"{sid} 1 {starts[k]:.3f} {ends[k] - starts[k]:.3f} {words[k]}"
                for k in range(n_words)
            ]
            (out / "align" / f"{sid}.ctm").write_text(
                "\n".join(ctm_lines) + "\n", encoding="utf-8"
            )
            wx = [
                {"word": words[k], "start": starts[k], "end": ends[k]}
                for k in range(n_words)
            ]
            (out / "align" / f"{sid}.json").write_text(
                json.dumps(wx, separators=(",", ":")) + "\n", encoding="utf-8"
            )

            samples.append(
                {
                    "id": sid,
                    "group": group,
                    "split": split,
                    "cha": f"cha/{sid}.cha",
                    "asr_text": f"asr/{sid}.txt",
                    "manual_align": f"align/{sid}.ctm",
                    "asr_align": f"align/{sid}.json",
                    "audio_duration": duration,
                }
            )

    (out / "lexicon.dic").write_text(_lexicon_text(), encoding="utf-8")
    _write_embeddings(out / "embeddings.vec", sorted(vocab), seed)
    labels = ["id,group"] + [f"{s['id']},{s['group']}" for s in samples]
    (out / "labels.csv").write_text("\n".join(labels) + "\n", encoding="utf-8")
    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps({"samples": samples}, indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return manifest_path


def _write_embeddings(path: Path, vocab: list[str], seed: int, dim: int = 300) -> None:
    """Tiny fastText-style text vectors covering the fixture vocabulary
    plus the pause marks, for the neural track."""
    tokens = vocab + [",", ".", "..."]
    rng = np.random.default_rng(seed + 1)
    lines = [f"{len(tokens)} {dim}"]
    for tok in tokens:
        vec = rng.normal(0.0, 0.5, size=dim)
        lines.append(tok + " " + " ".join(f"{v:.4f}" for v in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
