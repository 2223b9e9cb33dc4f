"""Dementia speech kit: transcript normalization, pause encoding, WER scoring
and classical-ML model selection for AD-vs-HC classification experiments."""

__version__ = "0.1.0"
