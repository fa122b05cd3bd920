"""Synthetic minority oversampling to balance relevance labels."""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator


class MinorityOversampler(BaseEstimator):
    """Balance a two-class dataset by interpolating minority samples.

    Each synthetic sample lies on the segment between a random minority
    sample and one of its k nearest minority neighbours. With a single
    minority sample there is nothing to interpolate, so it is duplicated
    (with a warning). An already balanced dataset passes through unchanged.
    """

    def __init__(self, k_neighbors=5, random_state=0):
        self.k_neighbors = k_neighbors
        self.random_state = random_state

    def fit_resample(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        classes, counts = np.unique(y, return_counts=True)
        if len(classes) != 2:
            raise ValueError(
                f"oversampling expects exactly 2 classes, got {len(classes)}"
            )
        if counts[0] == counts[1]:
            return X.copy(), y.copy()
        minority = classes[np.argmin(counts)]
        need = int(abs(counts[0] - counts[1]))
        minority_rows = X[y == minority]
        rng = np.random.default_rng(self.random_state)

        if len(minority_rows) == 1:
            warnings.warn(
                "single minority sample: duplicating it instead of interpolating",
                stacklevel=2,
            )
            synthetic = np.repeat(minority_rows, need, axis=0)
        else:
            # Pairwise distances among minority samples, self excluded.
            diffs = minority_rows[:, None, :] - minority_rows[None, :, :]
            dist = np.sqrt((diffs**2).sum(axis=2))
            np.fill_diagonal(dist, np.inf)
            k = min(self.k_neighbors, len(minority_rows) - 1)
            neighbor_idx = np.argsort(dist, axis=1)[:, :k]
            rows = []
            for _ in range(need):
                i = int(rng.integers(len(minority_rows)))
                j = int(neighbor_idx[i, int(rng.integers(k))])
                u = rng.random()
                rows.append(minority_rows[i] + u * (minority_rows[j] - minority_rows[i]))
            synthetic = np.vstack(rows)

        X_out = np.vstack([X, synthetic])
        y_out = np.concatenate([y, np.full(need, minority, dtype=y.dtype)])
        return X_out, y_out
