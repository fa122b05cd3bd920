"""Gerrit review-round client.

One review round per patch set: the round's submitted files are the patch
set's changed files, its comments are the ones written on that patch set,
and its revised files are the next patch set's (empty for the last one).
Comments written on a patch set are assigned to the immediately following
revision; when several newer patch sets exist this is an assumption, since
the host does not record which revision answered which comment.
"""

from __future__ import annotations

import base64
import binascii
import json
from urllib.parse import quote

from ..errors import FetchError, PayloadError
from ..types import FileVersion, ProjectRef, ReviewComment, ReviewRound
from .transport import HttpTransport

JSON_GUARD = b")]}'"

GERRIT_TOKEN_ENV = "REVIEWKIT_GERRIT_TOKEN"


def _decode_json(body, context):
    """Decode a Gerrit JSON body, tolerating the anti-XSSI guard prefix."""
    text = body
    if text.startswith(JSON_GUARD):
        text = text[len(JSON_GUARD) :]
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise PayloadError(f"{context}: invalid JSON ({exc})") from None


def _require(mapping, field, context):
    if not isinstance(mapping, dict) or field not in mapping:
        raise PayloadError(f"{context}: missing field {field!r}", field=field)
    return mapping[field]


def _is_java(path):
    return path.endswith(".java")


def _fetch_file_content(transport, change_number, revision_id, path):
    """File text at one revision, or None when absent there."""
    resource = (
        f"changes/{change_number}/revisions/{revision_id}"
        f"/files/{quote(path, safe='')}/content"
    )
    try:
        body = transport.get(resource)
    except FetchError as error:
        if error.status == 404:
            return None
        raise
    try:
        return base64.b64decode(body, validate=True).decode("utf-8")
    except (binascii.Error, UnicodeDecodeError) as exc:
        raise PayloadError(f"{resource}: undecodable content ({exc})") from None


def _patch_set_files(transport, change_number, revision_id, files_info):
    """FileVersions for one patch set; deleted files are simply absent."""
    versions = []
    for path in sorted(files_info):
        if not _is_java(path):
            continue
        info = files_info[path] or {}
        if info.get("status") == "D":
            continue
        content = _fetch_file_content(transport, change_number, revision_id, path)
        if content is None:
            continue
        versions.append(
            FileVersion(path=path, content=content, revision_id=revision_id)
        )
    return versions


def _comment_anchor(comment):
    """Line span of one comment, collapsing character ranges to lines."""
    comment_range = comment.get("range")
    if isinstance(comment_range, dict):
        start = comment_range.get("start_line")
        end = comment_range.get("end_line")
        if start and end:
            return int(start), int(end)
    line = comment.get("line")
    if line:
        return int(line), int(line)
    return None


def fetch_gerrit_rounds(project: ProjectRef, limit, transport=None):
    """Up to ``limit`` changes of one project, expanded into review rounds."""
    if project.host_kind != "gerrit":
        raise ValueError(f"expected a gerrit project, got {project.host_kind!r}")
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if limit == 0:
        return []
    if transport is None:
        transport = HttpTransport(project.base_url, token_env=GERRIT_TOKEN_ENV)

    listing = _decode_json(
        transport.get(
            "changes/",
            params={
                "q": f"project:{project.project_id}",
                "o": ["ALL_REVISIONS", "ALL_FILES"],
                "n": limit,
            },
        ),
        "changes listing",
    )
    if not isinstance(listing, list):
        raise PayloadError("changes listing: expected a JSON array")

    rounds = []
    for change in listing[:limit]:
        number = _require(change, "_number", "change")
        change_id = str(_require(change, "change_id", "change"))
        owner = str(_require(_require(change, "owner", "change"), "_account_id", "change owner"))
        revisions = _require(change, "revisions", "change")
        if not isinstance(revisions, dict) or not revisions:
            raise PayloadError("change: empty revisions", field="revisions")

        patch_sets = sorted(
            (
                (_require(info, "_number", f"revision {rev_id}"), rev_id, info)
                for rev_id, info in revisions.items()
            ),
        )

        comment_map = _decode_json(
            transport.get(f"changes/{number}/comments"), "change comments"
        )
        if not isinstance(comment_map, dict):
            raise PayloadError("change comments: expected a JSON object")

        file_sets = [
            _patch_set_files(transport, number, rev_id, info.get("files", {}))
            for _, rev_id, info in patch_sets
        ]

        for index, (ps_number, _, _) in enumerate(patch_sets):
            submitted = file_sets[index]
            submitted_paths = {f.path for f in submitted}
            comments = []
            for path in sorted(comment_map):
                if not _is_java(path) or path not in submitted_paths:
                    continue
                for comment in comment_map[path]:
                    if _require(comment, "patch_set", "comment") != ps_number:
                        continue
                    anchor = _comment_anchor(comment)
                    if anchor is None:
                        continue
                    body = str(comment.get("message", "")).strip()
                    if not body:
                        continue
                    author = _require(comment, "author", "comment")
                    author_id = str(_require(author, "_account_id", "comment author"))
                    comments.append(
                        ReviewComment(
                            author_id=author_id,
                            is_contributor=author_id == owner,
                            path=path,
                            line_start=anchor[0],
                            line_end=anchor[1],
                            body=body,
                            round_index=index,
                        )
                    )
            revised = file_sets[index + 1] if index + 1 < len(file_sets) else []
            rounds.append(
                ReviewRound(
                    project=project,
                    change_id=change_id,
                    round_index=index,
                    submitted=tuple(submitted),
                    comments=tuple(comments),
                    revised=tuple(revised),
                )
            )
    return rounds
