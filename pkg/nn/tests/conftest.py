import numpy as np
import pytest

from dsk_nn.embeddings import EmbeddingTable


def make_table(words: list[str], dim: int, seed: int = 0) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    vectors = np.zeros((len(words) + 1, dim))
    index = {}
    for i, w in enumerate(words, start=1):
        index[w] = i
        vectors[i] = rng.normal(0.0, 1.0, size=dim)
    return EmbeddingTable(index, vectors)


@pytest.fixture(scope="session")
def toy_table() -> EmbeddingTable:
    words = ["the", "boy", "good", "bad", "happy", "sad", ",", ".", "..."]
    return make_table(words, dim=8, seed=1)


@pytest.fixture(scope="session")
def separable_texts():
    """Ten texts whose class is carried by strongly separated embeddings."""
    pos = ["good happy good happy good", "happy good happy", "good good happy",
           "happy happy good good", "good happy happy"]
    neg = ["bad sad bad sad bad", "sad bad sad", "bad bad sad",
           "sad sad bad bad", "bad sad sad"]
    texts = pos + neg
    labels = np.array([1] * 5 + [0] * 5)
    rng = np.random.default_rng(2)
    dim = 8
    vectors = np.zeros((5, dim))
    index = {}
    for i, w in enumerate(["good", "happy", "bad", "sad"], start=1):
        base = 3.0 if w in ("good", "happy") else -3.0
        index[w] = i
        vectors[i] = base + 0.3 * rng.normal(size=dim)
    table = EmbeddingTable(index, vectors)
    return texts, labels, table
