"""Core data types for review mining and method pairing."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ProjectRef:
    """Identifies a repository on a review host."""

    host_kind: str  # "gerrit" | "github"
    base_url: str
    project_id: str


@dataclass(frozen=True)
class FileVersion:
    """One file's full content at a specific review revision."""

    path: str
    content: str
    revision_id: str


@dataclass(frozen=True)
class ReviewComment:
    """A reviewer (or author) remark anchored to lines of one file."""

    author_id: str
    is_contributor: bool
    path: str
    line_start: int
    line_end: int
    body: str
    round_index: int

    def __post_init__(self):
        if not (1 <= self.line_start <= self.line_end):
            raise ValueError(
                f"bad comment anchor [{self.line_start}, {self.line_end}]"
            )
        if not self.body.strip():
            raise ValueError("comment body is empty")


@dataclass(frozen=True)
class ReviewRound:
    """One submitted snapshot, the comments written on it, and the revision.

    ``revised`` is empty for the final round of a change (nothing followed).
    """

    project: ProjectRef
    change_id: str
    round_index: int
    submitted: tuple[FileVersion, ...]
    comments: tuple[ReviewComment, ...]
    revised: tuple[FileVersion, ...]


@dataclass(frozen=True)
class MethodRecord:
    """A single method declaration found in one file version."""

    file_path: str
    name: str
    signature_key: str
    parameter_arity: int
    line_start: int
    line_end: int
    source_text: str
    body_present: bool = True


@dataclass
class MethodPairing:
    """A method matched between the submitted and revised snapshots."""

    before: MethodRecord
    after: MethodRecord
    matched_by: str  # "signature" | "position" | "rename"


@dataclass
class SkipRecord:
    """A machine-readable note about an input that could not be processed."""

    path: str
    reason: str

    def as_dict(self):
        return {"path": self.path, "reason": self.reason}


@dataclass
class AttritionStats:
    """Counts of triplet candidates removed by each dataset filter stage.

    ``candidates`` is the number of (method pairing, surviving round comment
    set) units considered; every removal bucket plus ``emitted`` sums back to
    it exactly.
    """

    candidates: int = 0
    removed_relevance: int = 0
    removed_contributor: int = 0
    removed_comment_lines: int = 0
    removed_abstraction_error: int = 0
    removed_equal_after_abstraction: int = 0
    removed_too_long: int = 0
    removed_new_identifiers: int = 0
    removed_multi_comment: int = 0
    removed_empty_comment: int = 0
    emitted: int = 0
    comments_seen: int = 0
    comments_unlinked: int = 0
    skips: list[SkipRecord] = field(default_factory=list)

    REMOVAL_FIELDS = (
        "removed_relevance",
        "removed_contributor",
        "removed_comment_lines",
        "removed_abstraction_error",
        "removed_equal_after_abstraction",
        "removed_too_long",
        "removed_new_identifiers",
        "removed_multi_comment",
        "removed_empty_comment",
    )

    def total_removed(self):
        return sum(getattr(self, name) for name in self.REMOVAL_FIELDS)

    def as_dict(self):
        out = {"candidates": self.candidates}
        for name in self.REMOVAL_FIELDS:
            out[name] = getattr(self, name)
        out["emitted"] = self.emitted
        out["comments_seen"] = self.comments_seen
        out["comments_unlinked"] = self.comments_unlinked
        return out
