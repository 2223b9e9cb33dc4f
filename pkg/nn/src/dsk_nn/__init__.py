"""Word-embedding + recurrent-network transcript classifier.

Consumes rendered (optionally pause-encoded) transcript text files plus a
pretrained word-embedding table, trains a seeded ensemble of
bidirectional-LSTM models, and votes the per-seed predictions.
"""

__version__ = "0.1.0"
