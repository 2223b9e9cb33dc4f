"""The bidirectional-LSTM classifier and its seeded ensemble.

Architecture: biLSTM(128, all hidden states) over the embedded sequence,
dropout 0.2, global max pooling over time, dense(64, relu), a single
sigmoid output. Binary cross-entropy, Adam, batch size 10, 30 epochs,
25 seeds with majority voting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import tensorflow as tf
from tensorflow import keras

from dsk_nn.embeddings import EMBEDDING_DIM, MAX_LEN, EmbeddingTable, prepare_inputs

tf.config.experimental.enable_op_determinism()


@dataclass(frozen=True)
class NetConfig:
    embedding_dim: int = EMBEDDING_DIM
    max_len: int = MAX_LEN
    recurrent_units: int = 128
    dropout: float = 0.2
    dense_units: int = 64
    learning_rate: float = 0.001
    batch_size: int = 10
    epochs: int = 30
    n_seeds: int = 25


def build_model(config: NetConfig = NetConfig()) -> keras.Model:
    model = keras.Sequential(
        [
            keras.layers.Input(shape=(config.max_len, config.embedding_dim)),
            keras.layers.Bidirectional(
                keras.layers.LSTM(config.recurrent_units, return_sequences=True)
            ),
            keras.layers.Dropout(config.dropout),
            keras.layers.GlobalMaxPooling1D(),
            keras.layers.Dense(config.dense_units, activation="relu"),
            keras.layers.Dense(1, activation="sigmoid"),
        ]
    )
    model.compile(
        loss="binary_crossentropy",
        optimizer=keras.optimizers.Adam(learning_rate=config.learning_rate),
        metrics=["accuracy"],
    )
    return model


def train_one(
    train_texts: list[str],
    labels: np.ndarray,
    seed: int,
    table: EmbeddingTable,
    config: NetConfig = NetConfig(),
    verbose: int = 0,
) -> keras.Model:
    """Train one seeded model; deterministic given the seed."""
    labels = np.asarray(labels, dtype=np.float64)
    if np.unique(labels).size < 2:
        raise ValueError("training data contains a single class")
    keras.utils.set_random_seed(seed)
    X = prepare_inputs(train_texts, table, config.max_len)
    model = build_model(config)
    model.fit(
        X,
        labels,
        batch_size=config.batch_size,
        epochs=config.epochs,
        shuffle=True,
        verbose=verbose,
    )
    return model


def predict_probs(
    model: keras.Model,
    texts: list[str],
    table: EmbeddingTable,
    config: NetConfig = NetConfig(),
) -> np.ndarray:
    X = prepare_inputs(texts, table, config.max_len)
    return model.predict(X, verbose=0).reshape(-1)


def vote(prob_matrix: np.ndarray, mode: str = "per-model") -> np.ndarray:
    """Reduce an (n_models, n_samples) probability matrix to labels.

    ``per-model``: threshold each model at 0.5, then majority (odd model
    count required). ``average``: mean probability thresholded at 0.5.
    """
    prob_matrix = np.atleast_2d(prob_matrix)
    if mode == "average":
        return (prob_matrix.mean(axis=0) >= 0.5).astype(np.int64)
    if mode != "per-model":
        raise ValueError(f"unknown vote mode {mode!r}")
    n_models = prob_matrix.shape[0]
    if n_models % 2 == 0:
        raise ValueError("per-model voting needs an odd model count")
    votes = (prob_matrix >= 0.5).astype(np.int64).sum(axis=0)
    return (votes * 2 > n_models).astype(np.int64)


def ensemble_predict(
    models: list[keras.Model],
    texts: list[str],
    table: EmbeddingTable,
    config: NetConfig = NetConfig(),
    mode: str = "per-model",
) -> np.ndarray:
    probs = np.stack([predict_probs(m, texts, table, config) for m in models])
    return vote(probs, mode)
