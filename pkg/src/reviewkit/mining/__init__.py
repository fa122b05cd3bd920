"""Mining of code-review rounds from Gerrit and GitHub review APIs."""

from .archive import load_rounds, load_rounds_lenient, persist_rounds
from .gerrit import fetch_gerrit_rounds
from .github import fetch_github_rounds
from .transport import FixtureTransport, HttpTransport, Transport

__all__ = [
    "FixtureTransport",
    "HttpTransport",
    "Transport",
    "fetch_gerrit_rounds",
    "fetch_github_rounds",
    "load_rounds",
    "load_rounds_lenient",
    "persist_rounds",
]
