"""Information-gain feature selection for binary presence features."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

DEFAULT_GAIN_THRESHOLD = 0.01


def _entropy(y):
    """Shannon entropy of a label vector, in bits."""
    if len(y) == 0:
        return 0.0
    _, counts = np.unique(y, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def information_gain(column, y):
    """Mutual information between one binary feature column and the labels.

    Lies in [0, 1] for binary labels; 0 exactly when the feature tells you
    nothing about the label.
    """
    column = np.asarray(column)
    y = np.asarray(y)
    present = column != 0
    n = len(y)
    if n == 0:
        return 0.0
    p_present = present.sum() / n
    gain = _entropy(y)
    if p_present > 0:
        gain -= p_present * _entropy(y[present])
    if p_present < 1:
        gain -= (1 - p_present) * _entropy(y[~present])
    # Guard against tiny negative float residue.
    return max(gain, 0.0)


class InformationGainSelector(BaseEstimator, TransformerMixin):
    """Keep features whose information gain reaches the threshold."""

    def __init__(self, threshold=DEFAULT_GAIN_THRESHOLD):
        self.threshold = threshold

    def fit(self, X, y):
        X = np.asarray(X)
        y = np.asarray(y)
        if len(np.unique(y)) < 2:
            raise ValueError("information gain is undefined on single-class input")
        self.scores_ = np.array(
            [information_gain(X[:, j], y) for j in range(X.shape[1])]
        )
        self.support_ = self.scores_ >= self.threshold
        return self

    def transform(self, X):
        if not hasattr(self, "support_"):
            raise RuntimeError("InformationGainSelector.transform called before fit")
        return np.asarray(X)[:, self.support_]

    def get_support(self):
        return self.support_
