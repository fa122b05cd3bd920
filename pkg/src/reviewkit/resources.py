"""Loaders for data files bundled with the package."""

from importlib import resources


def _read_text(name):
    return resources.files("reviewkit").joinpath("data", name).read_text("utf-8")


def load_stopwords():
    """The bundled English stopword list, as a frozenset of lowercase words."""
    return frozenset(
        line.strip() for line in _read_text("stopwords.txt").splitlines() if line.strip()
    )


def default_rules_text():
    """The bundled comment-relevance rule file, verbatim."""
    return _read_text("relevance_rules.tsv")
