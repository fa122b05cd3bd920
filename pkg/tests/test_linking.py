"""Resolving comment line anchors to the methods containing them."""

from __future__ import annotations

from reviewkit.comments.linking import link_comment, link_comments
from reviewkit.java.methods import extract_methods
from reviewkit.types import FileVersion, MethodRecord, ReviewComment

SRC = """class Outer {
    void first() {
        one();
        two();
    }

    void second() {
        three();
    }
}
"""


def comment(start, end=None, path="T.java"):
    return ReviewComment(
        author_id="r",
        is_contributor=False,
        path=path,
        line_start=start,
        line_end=end or start,
        body="Change this.",
        round_index=0,
    )


def methods():
    return extract_methods(FileVersion("T.java", SRC, "r1"))


class TestLinkComment:
    def test_line_inside_body_links(self):
        m = link_comment(comment(3), methods())
        assert m.name == "first"

    def test_signature_line_links(self):
        m = link_comment(comment(7), methods())
        assert m.name == "second"

    def test_range_must_be_fully_contained(self):
        # lines 4..8 straddle the gap between first and second
        assert link_comment(comment(4, 8), methods()) is None

    def test_line_outside_any_method_does_not_link(self):
        assert link_comment(comment(1), methods()) is None  # class header
        assert link_comment(comment(6), methods()) is None  # blank gap

    def test_innermost_wins_for_nested_spans(self):
        outer = MethodRecord(
            file_path="T.java", name="outer", signature_key="outer()",
            parameter_arity=0, line_start=1, line_end=20, source_text="",
        )
        inner = MethodRecord(
            file_path="T.java", name="inner", signature_key="inner()",
            parameter_arity=0, line_start=5, line_end=9, source_text="",
        )
        assert link_comment(comment(6), [outer, inner]).name == "inner"

    def test_equal_span_tie_prefers_earlier_method(self):
        a = MethodRecord(
            file_path="T.java", name="a", signature_key="a()",
            parameter_arity=0, line_start=3, line_end=7, source_text="",
        )
        b = MethodRecord(
            file_path="T.java", name="b", signature_key="b()",
            parameter_arity=0, line_start=5, line_end=9, source_text="",
        )
        assert link_comment(comment(5, 7), [b, a]).name == "a"


class TestLinkComments:
    def test_splits_linked_and_unlinked(self):
        linked, unlinked = link_comments(
            [comment(3), comment(1), comment(8)], {"T.java": methods()}
        )
        assert [l.method.name for l in linked] == ["first", "second"]
        assert [u.line_start for u in unlinked] == [1]

    def test_unknown_path_is_unlinked(self):
        linked, unlinked = link_comments(
            [comment(3, path="Other.java")], {"T.java": methods()}
        )
        assert linked == []
        assert len(unlinked) == 1

    def test_method_key_is_stable_and_distinct(self):
        linked, _ = link_comments([comment(3), comment(8)], {"T.java": methods()})
        keys = {l.method_key for l in linked}
        assert len(keys) == 2
        assert all("T.java::" in k for k in keys)
