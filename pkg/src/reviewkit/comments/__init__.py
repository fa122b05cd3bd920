"""Reviewer-comment handling: linking, heuristic filtering, classification."""

from reviewkit.comments.heuristics import RelevanceRule, heuristic_relevance, load_rules
from reviewkit.comments.linking import LinkedComment, link_comments

__all__ = [
    "RelevanceRule",
    "heuristic_relevance",
    "load_rules",
    "LinkedComment",
    "link_comments",
]
