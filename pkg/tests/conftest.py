"""Shared test helpers: deterministic models and fixture paths."""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURE_DIR = TESTS_DIR / "fixtures"


class SeededModel:
    """A deterministic pseudo-random sequence model.

    Every (inputs, prefix) pair maps to a fixed categorical distribution
    over the vocabulary, so decoding results are reproducible and the
    exponentiated log-probs sum to one.
    """

    def __init__(self, seed, vocab=("a", "b"), eos="<eos>"):
        self._seed = seed
        self._eos = eos
        self._vocab = tuple(vocab) + (eos,)

    @property
    def vocabulary(self):
        return self._vocab

    @property
    def eos_token(self):
        return self._eos

    def log_probs(self, inputs, prefix):
        rng = random.Random(f"{self._seed}|{tuple(inputs)}|{tuple(prefix)}")
        weights = [rng.uniform(0.05, 1.0) for _ in self._vocab]
        total = sum(weights)
        return {t: math.log(w / total) for t, w in zip(self._vocab, weights)}


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE_DIR
