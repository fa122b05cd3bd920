"""Comment-relevance classifiers and their cross-validated evaluation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.ensemble import RandomForestClassifier
from sklearn.metrics import precision_recall_fscore_support
from sklearn.model_selection import StratifiedKFold
from sklearn.naive_bayes import BernoulliNB
from sklearn.tree import DecisionTreeClassifier

from reviewkit.comments.features import CommentFeaturizer
from reviewkit.comments.oversample import MinorityOversampler
from reviewkit.comments.selection import DEFAULT_GAIN_THRESHOLD, InformationGainSelector

CLASSIFIER_KINDS = ("random_forest", "decision_tree", "naive_bayes")


class RelevanceClassifier(BaseEstimator, ClassifierMixin):
    """A thin, kind-switched wrapper over the supported classifiers."""

    def __init__(self, kind="random_forest", n_estimators=100, random_state=0):
        self.kind = kind
        self.n_estimators = n_estimators
        self.random_state = random_state

    def _build(self):
        if self.kind == "random_forest":
            return RandomForestClassifier(
                n_estimators=self.n_estimators, random_state=self.random_state
            )
        if self.kind == "decision_tree":
            return DecisionTreeClassifier(random_state=self.random_state)
        if self.kind == "naive_bayes":
            return BernoulliNB()
        raise ValueError(
            f"unknown classifier kind {self.kind!r}; expected one of {CLASSIFIER_KINDS}"
        )

    def fit(self, X, y):
        self.model_ = self._build()
        self.model_.fit(X, y)
        self.classes_ = self.model_.classes_
        return self

    def predict(self, X):
        return self.model_.predict(X)

    def predict_proba(self, X):
        return self.model_.predict_proba(X)


class RelevancePipeline:
    """A trained featurize → select → classify chain over comment bodies."""

    def __init__(self, featurizer, selector, classifier):
        self.featurizer = featurizer
        self.selector = selector
        self.classifier = classifier

    def classify(self, body):
        X = self.selector.transform(self.featurizer.transform([body]))
        return self.classifier.predict(X)[0]


def train_relevance_model(
    bodies,
    labels,
    kind="random_forest",
    gain_threshold=DEFAULT_GAIN_THRESHOLD,
    oversample=True,
    seed=0,
):
    """Train a relevance pipeline on labeled comment bodies."""
    bodies = list(bodies)
    y = np.asarray(labels)
    featurizer = CommentFeaturizer()
    X = featurizer.fit(bodies).transform(bodies)
    selector = InformationGainSelector(threshold=gain_threshold)
    X = selector.fit(X, y).transform(X)
    if oversample:
        X, y = MinorityOversampler(random_state=seed).fit_resample(X, y)
    classifier = RelevanceClassifier(kind=kind, random_state=seed)
    classifier.fit(X, y)
    return RelevancePipeline(featurizer, selector, classifier)


def constant_relevant_precision(labels, positive="relevant"):
    """Precision of the baseline that calls every comment ``positive``."""
    labels = list(labels)
    if not labels:
        return 0.0
    return labels.count(positive) / len(labels)


def cross_validate_relevance(
    bodies,
    labels,
    kind="random_forest",
    folds=10,
    gain_threshold=DEFAULT_GAIN_THRESHOLD,
    oversample=True,
    seed=0,
):
    """Stratified k-fold evaluation of a relevance classifier.

    Featurization, gain-based selection, and minority oversampling are all
    fitted inside each training fold; held-out comments only ever pass
    through transforms learned without them.

    Returns aggregate accuracy and per-class precision/recall/f1.
    """
    bodies = list(bodies)
    y = np.asarray(labels)
    if len(bodies) < folds:
        raise ValueError(
            f"need at least {folds} labeled comments for {folds}-fold validation"
        )
    skf = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    y_true_all = []
    y_pred_all = []
    for train_idx, test_idx in skf.split(np.zeros(len(bodies)), y):
        train_bodies = [bodies[i] for i in train_idx]
        test_bodies = [bodies[i] for i in test_idx]
        featurizer = CommentFeaturizer()
        X_train = featurizer.fit(train_bodies).transform(train_bodies)
        selector = InformationGainSelector(threshold=gain_threshold)
        X_train = selector.fit(X_train, y[train_idx]).transform(X_train)
        y_train = y[train_idx]
        if oversample:
            X_train, y_train = MinorityOversampler(random_state=seed).fit_resample(
                X_train, y_train
            )
        clf = RelevanceClassifier(kind=kind, random_state=seed)
        clf.fit(X_train, y_train)
        X_test = selector.transform(featurizer.transform(test_bodies))
        y_pred_all.extend(clf.predict(X_test))
        y_true_all.extend(y[test_idx])

    y_true_all = np.asarray(y_true_all)
    y_pred_all = np.asarray(y_pred_all)
    classes = sorted(np.unique(y).tolist())
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true_all, y_pred_all, labels=classes, zero_division=0
    )
    per_class = {
        cls: {
            "precision": float(p),
            "recall": float(r),
            "f1": float(f),
            "support": int(s),
        }
        for cls, p, r, f, s in zip(classes, precision, recall, f1, support)
    }
    return {
        "accuracy": float((y_true_all == y_pred_all).mean()),
        "per_class": per_class,
        "folds": folds,
        "kind": kind,
    }
