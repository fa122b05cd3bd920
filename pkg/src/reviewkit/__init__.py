"""Toolkit for mining code-review rounds and modelling review-induced code changes.

The package covers the full pipeline: fetching review rounds from Gerrit or
GitHub, extracting and pairing Java methods across review rounds, abstracting
token streams into a compact vocabulary, filtering reviewer comments, building
train/eval/test dataset bundles, and scoring sequence-model predictions with
perfect-prediction counts, BLEU-4, and normalized token-level Levenshtein.
"""

__version__ = "0.1.0"
