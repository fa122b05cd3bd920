"""Line-delimited persistence for review rounds.

One JSON object per line, each carrying "schema_version": 1, so archives
can be concatenated and partially recovered. Loading is strict by default;
the lenient loader reports corrupt lines instead of failing.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ArchiveError, SchemaVersionError
from ..types import FileVersion, ProjectRef, ReviewComment, ReviewRound

SCHEMA_VERSION = 1


def _round_to_dict(review_round):
    return {
        "schema_version": SCHEMA_VERSION,
        "project": {
            "host_kind": review_round.project.host_kind,
            "base_url": review_round.project.base_url,
            "project_id": review_round.project.project_id,
        },
        "change_id": review_round.change_id,
        "round_index": review_round.round_index,
        "submitted": [_file_to_dict(f) for f in review_round.submitted],
        "comments": [_comment_to_dict(c) for c in review_round.comments],
        "revised": [_file_to_dict(f) for f in review_round.revised],
    }


def _file_to_dict(file_version):
    return {
        "path": file_version.path,
        "content": file_version.content,
        "revision_id": file_version.revision_id,
    }


def _comment_to_dict(comment):
    return {
        "author_id": comment.author_id,
        "is_contributor": comment.is_contributor,
        "path": comment.path,
        "line_start": comment.line_start,
        "line_end": comment.line_end,
        "body": comment.body,
        "round_index": comment.round_index,
    }


def _round_from_dict(record):
    version = record.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(found=version, supported=SCHEMA_VERSION)
    project = record["project"]
    return ReviewRound(
        project=ProjectRef(
            host_kind=project["host_kind"],
            base_url=project["base_url"],
            project_id=project["project_id"],
        ),
        change_id=record["change_id"],
        round_index=record["round_index"],
        submitted=tuple(
            FileVersion(f["path"], f["content"], f["revision_id"])
            for f in record["submitted"]
        ),
        comments=tuple(
            ReviewComment(
                author_id=c["author_id"],
                is_contributor=c["is_contributor"],
                path=c["path"],
                line_start=c["line_start"],
                line_end=c["line_end"],
                body=c["body"],
                round_index=c["round_index"],
            )
            for c in record["comments"]
        ),
        revised=tuple(
            FileVersion(f["path"], f["content"], f["revision_id"])
            for f in record["revised"]
        ),
    )


def persist_rounds(rounds, sink):
    """Write rounds to a path or text file object; returns the count."""
    count = 0
    if hasattr(sink, "write"):
        for review_round in rounds:
            sink.write(json.dumps(_round_to_dict(review_round), sort_keys=True))
            sink.write("\n")
            count += 1
        return count
    with open(Path(sink), "w", encoding="utf-8") as handle:
        return persist_rounds(rounds, handle)


def _iter_lines(source):
    if hasattr(source, "read"):
        yield from enumerate(source.read().splitlines(), start=1)
    else:
        text = Path(source).read_text(encoding="utf-8")
        yield from enumerate(text.splitlines(), start=1)


def load_rounds(source):
    """Load an archive strictly; any corrupt line raises ArchiveError."""
    rounds = []
    for line_no, line in _iter_lines(source):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            rounds.append(_round_from_dict(record))
        except SchemaVersionError:
            raise
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ArchiveError(f"archive line {line_no}: {exc}") from None
    return rounds


def load_rounds_lenient(source):
    """Load an archive, skipping corrupt lines.

    Returns (rounds, skips) where skips is a list of (line_no, reason).
    Schema-version mismatches are never skipped: a wrong version means the
    whole file needs migration, not line repair.
    """
    rounds = []
    skips = []
    for line_no, line in _iter_lines(source):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            rounds.append(_round_from_dict(record))
        except SchemaVersionError:
            raise
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            skips.append((line_no, str(exc)))
    return rounds, skips
