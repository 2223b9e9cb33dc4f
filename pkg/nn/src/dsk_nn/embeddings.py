"""Pretrained word-vector loading, tokenization and sequence embedding.

The embedding file uses the standard text vector format: a first line
``vocab_size dim`` followed by ``token v1 .. vdim`` lines. Sequences are
lowercased, whitespace-tokenized and padded/truncated to a fixed length;
pad positions and out-of-vocabulary tokens share index 0, whose embedding
row is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_LEN = 250
EMBEDDING_DIM = 300
PAD_INDEX = 0


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    index: dict[str, int]  # token -> row (1-based; 0 is the pad/OOV row)
    vectors: np.ndarray  # (vocab+1, dim), row 0 all zeros

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def load_embeddings(path, expected_dim: int = EMBEDDING_DIM) -> EmbeddingTable:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError("first line must be 'vocab_size dim'")
        vocab_size, dim = int(header[0]), int(header[1])
        if expected_dim is not None and dim != expected_dim:
            raise EmbeddingError(f"embedding dim {dim} != required {expected_dim}")
        index: dict[str, int] = {}
        vectors = np.zeros((vocab_size + 1, dim), dtype=np.float64)
        row = 1
        for line in fh:
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise EmbeddingError(f"bad vector line for token {parts[0]!r}")
            token = parts[0]
            if token in index:
                continue  # keep the first occurrence
            if row > vocab_size:
                raise EmbeddingError("more vectors than the header declared")
            index[token] = row
            vectors[row] = [float(x) for x in parts[1:]]
            row += 1
    return EmbeddingTable(index, vectors)


def tokenize_pad(text: str, table: EmbeddingTable, max_len: int = MAX_LEN) -> np.ndarray:
    """Lowercase, whitespace-tokenize, map to indices, pad/truncate.

    Pause marks (",", ".", "...") are ordinary whitespace-separated tokens
    and survive as long as the table carries vectors for them.
    """
    tokens = text.lower().split()[:max_len]
    seq = np.full(max_len, PAD_INDEX, dtype=np.int64)
    for i, tok in enumerate(tokens):
        seq[i] = table.index.get(tok, PAD_INDEX)
    return seq


def embed_lookup(seq: np.ndarray, table: EmbeddingTable) -> np.ndarray:
    """(max_len, dim) matrix; pad and OOV positions are zero rows."""
    return table.vectors[seq]


def prepare_inputs(
    texts: list[str], table: EmbeddingTable, max_len: int = MAX_LEN
) -> np.ndarray:
    return np.stack([embed_lookup(tokenize_pad(t, table, max_len), table) for t in texts])
