"""GitHub pull-request review-round client.

Round boundaries: a new round begins at each contributor push that follows
at least one reviewer comment. Consecutive commits with no reviewer comment
in between count as one push. Trailing comments that never got a revision
form a final round with no revised files; a pull request with no review
activity still yields one round so the submission itself is recorded.
"""

from __future__ import annotations

import base64
import binascii
import json
from datetime import datetime

from ..errors import FetchError, PayloadError
from ..types import FileVersion, ProjectRef, ReviewComment, ReviewRound
from .transport import HttpTransport

GITHUB_TOKEN_ENV = "REVIEWKIT_GITHUB_TOKEN"

_KIND_COMMENT = 0
_KIND_COMMIT = 1


def _decode_json(body, context):
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise PayloadError(f"{context}: invalid JSON ({exc})") from None


def _require(mapping, field, context):
    if not isinstance(mapping, dict) or field not in mapping or mapping[field] is None:
        raise PayloadError(f"{context}: missing field {field!r}", field=field)
    return mapping[field]


def _parse_time(text, context):
    try:
        return datetime.fromisoformat(str(text).replace("Z", "+00:00"))
    except ValueError:
        raise PayloadError(f"{context}: bad timestamp {text!r}") from None


def _is_java(path):
    return path.endswith(".java")


def _fetch_file_at(transport, project_id, path, ref):
    """File text at one commit, or None when the file does not exist there."""
    try:
        body = transport.get(f"repos/{project_id}/contents/{path}", params={"ref": ref})
    except FetchError as error:
        if error.status == 404:
            return None
        raise
    payload = _decode_json(body, f"contents of {path}@{ref}")
    encoded = _require(payload, "content", f"contents of {path}@{ref}")
    try:
        return base64.b64decode(encoded, validate=False).decode("utf-8")
    except (binascii.Error, UnicodeDecodeError) as exc:
        raise PayloadError(f"contents of {path}@{ref}: undecodable ({exc})") from None


def _files_at(transport, project_id, paths, ref):
    versions = []
    for path in paths:
        content = _fetch_file_at(transport, project_id, path, ref)
        if content is not None:
            versions.append(FileVersion(path=path, content=content, revision_id=ref))
    return versions


def _comment_anchor(comment):
    end = comment.get("line") or comment.get("original_line")
    if not end:
        return None
    start = comment.get("start_line") or comment.get("original_start_line") or end
    return int(start), int(end)


def _timeline(pr_author, commits_payload, comments_payload):
    """Commits and review comments merged into one time-ordered event list.

    Comments sort before commits at equal timestamps, so a push answering a
    just-written comment closes the round containing it.
    """
    events = []
    for position, commit in enumerate(commits_payload):
        sha = _require(commit, "sha", "commit")
        when = _parse_time(
            _require(
                _require(_require(commit, "commit", "commit"), "committer", "commit"),
                "date",
                "commit",
            ),
            "commit",
        )
        author = (commit.get("author") or {}).get("login")
        events.append((when, _KIND_COMMIT, position, {"sha": sha, "author": author}))
    for position, comment in enumerate(comments_payload):
        when = _parse_time(_require(comment, "created_at", "comment"), "comment")
        events.append((when, _KIND_COMMENT, position, comment))
    events.sort(key=lambda e: (e[0], e[1], e[2]))
    return events


def _segment_rounds(pr_author, events):
    """Split a pull request's timeline into (head, comments, revised_head).

    Returns segments with raw comment payloads; revised_head None means no
    revision followed.
    """
    index = 0
    head = None
    while index < len(events) and events[index][1] == _KIND_COMMIT:
        head = events[index][3]["sha"]
        index += 1
    if head is None:
        raise PayloadError("pull request has no commits", field="commits")

    segments = []
    comments = []
    seen_reviewer = False
    while index < len(events):
        kind = events[index][1]
        payload = events[index][3]
        if kind == _KIND_COMMENT:
            comments.append(payload)
            author = _require(payload, "user", "comment").get("login")
            seen_reviewer = seen_reviewer or author != pr_author
            index += 1
            continue
        # Consume one run of consecutive commits.
        run_last = payload["sha"]
        by_contributor = payload["author"] == pr_author
        index += 1
        while index < len(events) and events[index][1] == _KIND_COMMIT:
            by_contributor = by_contributor or events[index][3]["author"] == pr_author
            run_last = events[index][3]["sha"]
            index += 1
        if seen_reviewer and by_contributor:
            segments.append((head, comments, run_last))
            head = run_last
            comments = []
            seen_reviewer = False
        elif not comments:
            head = run_last
    if comments or not segments:
        segments.append((head, comments, None))
    return segments


def fetch_github_rounds(project: ProjectRef, limit, transport=None):
    """Up to ``limit`` pull requests of one repository, as review rounds."""
    if project.host_kind != "github":
        raise ValueError(f"expected a github project, got {project.host_kind!r}")
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if limit == 0:
        return []
    if transport is None:
        transport = HttpTransport(project.base_url, token_env=GITHUB_TOKEN_ENV)

    pid = project.project_id
    pulls = _decode_json(
        transport.get(
            f"repos/{pid}/pulls", params={"state": "all", "per_page": limit}
        ),
        "pulls listing",
    )
    if not isinstance(pulls, list):
        raise PayloadError("pulls listing: expected a JSON array")

    rounds = []
    for pr in pulls[:limit]:
        number = _require(pr, "number", "pull request")
        pr_author = str(_require(_require(pr, "user", "pull request"), "login", "pull request user"))
        commits_payload = _decode_json(
            transport.get(f"repos/{pid}/pulls/{number}/commits"), "pull commits"
        )
        comments_payload = _decode_json(
            transport.get(f"repos/{pid}/pulls/{number}/comments"), "pull comments"
        )
        files_payload = _decode_json(
            transport.get(f"repos/{pid}/pulls/{number}/files"), "pull files"
        )
        paths = sorted(
            {
                _require(entry, "filename", "pull file")
                for entry in files_payload
                if _is_java(_require(entry, "filename", "pull file"))
            }
        )

        events = _timeline(pr_author, commits_payload, comments_payload)
        segments = _segment_rounds(pr_author, events)

        for round_index, (head, raw_comments, revised_head) in enumerate(segments):
            submitted = _files_at(transport, pid, paths, head)
            submitted_paths = {f.path for f in submitted}
            comments = []
            for raw in raw_comments:
                path = raw.get("path")
                if not path or not _is_java(path) or path not in submitted_paths:
                    continue
                anchor = _comment_anchor(raw)
                if anchor is None:
                    continue
                body = str(raw.get("body", "")).strip()
                if not body:
                    continue
                author = str(_require(_require(raw, "user", "comment"), "login", "comment user"))
                comments.append(
                    ReviewComment(
                        author_id=author,
                        is_contributor=author == pr_author,
                        path=path,
                        line_start=anchor[0],
                        line_end=anchor[1],
                        body=body,
                        round_index=round_index,
                    )
                )
            revised = (
                _files_at(transport, pid, paths, revised_head)
                if revised_head
                else []
            )
            rounds.append(
                ReviewRound(
                    project=project,
                    change_id=str(number),
                    round_index=round_index,
                    submitted=tuple(submitted),
                    comments=tuple(comments),
                    revised=tuple(revised),
                )
            )
    return rounds
