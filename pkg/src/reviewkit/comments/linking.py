"""Attach review comments to the methods whose lines they touch."""

from __future__ import annotations

from dataclasses import dataclass

from reviewkit.types import MethodRecord, ReviewComment

RELEVANCE_UNKNOWN = "unknown"
RELEVANCE_RELEVANT = "relevant"
RELEVANCE_IRRELEVANT = "irrelevant"


@dataclass
class LinkedComment:
    """A review comment resolved to a single method record."""

    comment: ReviewComment
    method: MethodRecord
    relevance: str = RELEVANCE_UNKNOWN
    fired_rule: str | None = None

    @property
    def method_key(self):
        m = self.method
        return f"{m.file_path}::{m.signature_key}@{m.line_start}"


def link_comment(comment, methods):
    """Resolve one comment to the innermost method containing its anchors.

    Both anchor lines must fall inside the method's span (annotations and
    signature included); a comment straddling a method boundary matches
    nothing. Nested declarations shadow their enclosing method, so the
    shortest containing span wins.
    """
    best = None
    for method in methods:
        if method.line_start <= comment.line_start and comment.line_end <= method.line_end:
            span = method.line_end - method.line_start
            if best is None or (span, method.line_start) < best[:2]:
                best = (span, method.line_start, method)
    return best[2] if best else None


def link_comments(comments, methods_by_path):
    """Batch form of link_comment over a path→methods index.

    Returns (linked, unlinked); comments whose anchors sit in no method
    (imports, fields, class headers) come back in the unlinked list.
    """
    linked = []
    unlinked = []
    for comment in comments:
        method = link_comment(comment, methods_by_path.get(comment.path, ()))
        if method is None:
            unlinked.append(comment)
        else:
            linked.append(LinkedComment(comment=comment, method=method))
    return linked, unlinked
