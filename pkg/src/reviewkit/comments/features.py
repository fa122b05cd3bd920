"""Binary n-gram features over review-comment text."""

from __future__ import annotations

import re
from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from reviewkit.comments.stemming import porter_stem
from reviewkit.resources import load_stopwords

_EDGE_PUNCT_RE = re.compile(r"^[^a-z0-9_$]+|[^a-z0-9_$]+$")


def _clean_words(body):
    """Lowercase, strip edge punctuation, drop words that vanish."""
    out = []
    for word in body.lower().split():
        core = _EDGE_PUNCT_RE.sub("", word)
        if core:
            out.append(core)
    return out


class CommentFeaturizer(BaseEstimator, TransformerMixin):
    """Turn comment bodies into word n-gram count features.

    Unigrams are stopword-filtered and Porter-stemmed; bigrams and trigrams
    are built from the cleaned word stream as-is, so phrases like
    "if condition" survive even though their words are stopwords alone.
    Downstream selection treats columns as presence indicators.
    """

    def __init__(self, ngram_sizes=(1, 2, 3), stopwords=None):
        self.ngram_sizes = ngram_sizes
        self.stopwords = stopwords

    def _features_of(self, body):
        words = _clean_words(body)
        feats = Counter()
        if 1 in self.ngram_sizes:
            for w in words:
                if w in self._stopwords_:
                    continue
                feats["1:" + porter_stem(w)] += 1
        for n in self.ngram_sizes:
            if n == 1:
                continue
            for i in range(len(words) - n + 1):
                feats[f"{n}:" + " ".join(words[i : i + n])] += 1
        return feats

    def fit(self, X, y=None):
        self._stopwords_ = (
            load_stopwords() if self.stopwords is None else frozenset(self.stopwords)
        )
        vocab = set()
        for body in X:
            vocab.update(self._features_of(body))
        names = sorted(vocab)
        self.vocabulary_ = {name: i for i, name in enumerate(names)}
        self.feature_names_ = names
        return self

    def transform(self, X):
        if not hasattr(self, "vocabulary_"):
            raise RuntimeError("CommentFeaturizer.transform called before fit")
        matrix = np.zeros((len(X), len(self.vocabulary_)), dtype=np.float64)
        for row, body in enumerate(X):
            for feat, count in self._features_of(body).items():
                col = self.vocabulary_.get(feat)
                if col is not None:
                    matrix[row, col] = float(count)
        return matrix

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names_, dtype=object)
