"""Heuristic rules that weed out review comments no code change can satisfy.

Rules come from a tab-separated file with one rule per line:

    rule_id<TAB>kind<TAB>pattern

where ``kind`` is one of:

* ``keyword``  - the word appears in the body (case-insensitive, word bounds)
* ``regex``    - the pattern matches somewhere in the body (case-insensitive)
* ``maxwords`` - the body has at most ``pattern`` whitespace-separated words

A comment is irrelevant when any rule fires; the seven stock rule families
cover bare acknowledgements, thanks/approvals, formatting nits, test
requests, clarification questions, references the revision cannot resolve,
and documentation-only asks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from reviewkit.comments.linking import RELEVANCE_IRRELEVANT, RELEVANCE_RELEVANT
from reviewkit.errors import RuleFileError
from reviewkit.resources import default_rules_text

_KINDS = ("keyword", "regex", "maxwords")


@dataclass(frozen=True)
class RelevanceRule:
    rule_id: str
    kind: str
    pattern: str

    def matches(self, body):
        if self.kind == "maxwords":
            return len(body.split()) <= int(self.pattern)
        if self.kind == "keyword":
            return (
                re.search(rf"\b{re.escape(self.pattern)}\b", body, re.IGNORECASE)
                is not None
            )
        return re.search(self.pattern, body, re.IGNORECASE) is not None


def parse_rules(text):
    rules = []
    seen = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise RuleFileError(
                f"expected 3 tab-separated fields, got {len(parts)}", line_no
            )
        rule_id, kind, pattern = (p.strip() for p in parts)
        if not rule_id:
            raise RuleFileError("empty rule id", line_no)
        if rule_id in seen:
            raise RuleFileError(f"duplicate rule id {rule_id!r}", line_no)
        seen.add(rule_id)
        if kind not in _KINDS:
            raise RuleFileError(f"unknown kind {kind!r}", line_no)
        if kind == "maxwords":
            try:
                bound = int(pattern)
            except ValueError:
                bound = -1
            if bound < 1:
                raise RuleFileError(
                    f"maxwords needs a positive integer, got {pattern!r}", line_no
                )
        if kind == "regex":
            try:
                re.compile(pattern)
            except re.error as exc:
                raise RuleFileError(f"bad regex: {exc}", line_no)
        rules.append(RelevanceRule(rule_id, kind, pattern))
    return rules


def load_rules(path=None):
    """Load relevance rules from ``path``, or the bundled defaults."""
    if path is None:
        return parse_rules(default_rules_text())
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def heuristic_relevance(body, rules=None):
    """Classify one comment body.

    Returns ``(label, fired_rule_id)``; the first firing rule (file order)
    wins, and a relevant comment reports no rule. With ``rules=None`` the
    bundled rule set applies.
    """
    if rules is None:
        rules = load_rules()
    for rule in rules:
        if rule.matches(body):
            return RELEVANCE_IRRELEVANT, rule.rule_id
    return RELEVANCE_RELEVANT, None
