"""Token abstraction for method pairs and reviewer comments.

Identifiers and literals are replaced by compact typed IDs (VAR_n, METHOD_n,
TYPE_n, STRING_n, CHAR_n, INT_n, FLOAT_n) assigned in order of first
occurrence, scanning the submitted method first and the revised method after
it. Java keywords and punctuation pass through unchanged, as do the tokens of
a configured idiom set. The mapping is recoverable: ``concretize`` inverts an
abstracted stream exactly.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from reviewkit.errors import AbstractionError, LexError
from reviewkit.java import lexer as jlex

KIND_KEYWORD = "keyword"
KIND_PUNCTUATION = "punctuation"
KIND_IDENTIFIER = "identifier"
KIND_LITERAL = "literal"
KIND_ABSTRACT = "abstract_id"
KIND_SPECIAL = "special"

CATEGORY_BY_LITERAL_KIND = {
    jlex.KIND_STRING: "STRING",
    jlex.KIND_CHAR: "CHAR",
    jlex.KIND_INT: "INT",
    jlex.KIND_FLOAT: "FLOAT",
}
CATEGORIES = ("VAR", "METHOD", "TYPE", "STRING", "CHAR", "INT", "FLOAT")

START_TEXT = "<START>"
END_TEXT = "<END>"
CODE_WORD = "_CODE_"

ABSTRACT_ID_RE = re.compile(r"^(?:VAR|METHOD|TYPE|STRING|CHAR|INT|FLOAT)_[1-9][0-9]*$")
_URL_RE = re.compile(r"^(?:https?://|www\.)", re.IGNORECASE)
_CAMEL_RE = re.compile(r"[a-z][A-Z]")
_SNAKE_RE = re.compile(r"[A-Za-z0-9]_[A-Za-z0-9]")
_EDGE_PUNCT_RE = re.compile(r"^[^A-Za-z0-9_$]+|[^A-Za-z0-9_$]+$")


@dataclass(frozen=True)
class Token:
    text: str
    kind: str


START_MARKER = Token(START_TEXT, KIND_SPECIAL)
END_MARKER = Token(END_TEXT, KIND_SPECIAL)


@dataclass(frozen=True)
class AbstractedMethod:
    """An abstracted token stream with per-token source line provenance."""

    tokens: tuple[Token, ...]
    lines: tuple[int, ...]

    @property
    def token_count(self):
        return len(self.tokens)

    def texts(self):
        return [t.text for t in self.tokens]

    def abstract_ids(self):
        """The set of abstract IDs appearing in this stream."""
        return {t.text for t in self.tokens if t.kind == KIND_ABSTRACT}


def _escape(raw):
    return (
        raw.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape(raw):
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw):
            nxt = raw[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class AbstractionMap:
    """The recoverable mapping between abstract IDs and raw tokens.

    One map is shared by both methods of a pair. The first occurrence of a
    raw token fixes both its category and its index; later occurrences of the
    same raw text reuse that ID regardless of syntactic position, so the same
    token always means the same thing on both sides of the pair.
    """

    def __init__(self):
        self.ids = {}  # abstract ID -> raw text, in assignment order
        self._by_raw = {}  # raw text -> abstract ID
        self._counters = {cat: 0 for cat in CATEGORIES}

    def __len__(self):
        return len(self.ids)

    def lookup_raw(self, raw):
        return self._by_raw.get(raw)

    @property
    def reverse(self):
        """View of the inverse mapping keyed by (raw text, category)."""
        return {
            (raw, abstract_id.rsplit("_", 1)[0]): abstract_id
            for abstract_id, raw in self.ids.items()
        }

    def assign(self, raw, category):
        """Return the ID for ``raw``, creating one in ``category`` if new."""
        existing = self._by_raw.get(raw)
        if existing is not None:
            return existing
        self._counters[category] += 1
        abstract_id = f"{category}_{self._counters[category]}"
        self.ids[abstract_id] = raw
        self._by_raw[raw] = abstract_id
        return abstract_id

    def raw_for(self, abstract_id):
        try:
            return self.ids[abstract_id]
        except KeyError:
            raise AbstractionError(f"unknown abstract ID {abstract_id!r}")

    def dump(self):
        """Serialize as one `ID<TAB>raw` line per entry, in assignment order.

        Tabs, newlines, and backslashes inside raw text are backslash-escaped
        so the line format stays parseable.
        """
        return "".join(
            f"{abstract_id}\t{_escape(raw)}\n" for abstract_id, raw in self.ids.items()
        )

    @classmethod
    def parse(cls, text):
        amap = cls()
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line:
                continue
            if "\t" not in line:
                raise AbstractionError(f"map line {line_no}: missing tab separator")
            abstract_id, raw = line.split("\t", 1)
            if not ABSTRACT_ID_RE.match(abstract_id):
                raise AbstractionError(f"map line {line_no}: bad ID {abstract_id!r}")
            raw = _unescape(raw)
            category, index = abstract_id.rsplit("_", 1)
            amap.ids[abstract_id] = raw
            amap._by_raw[raw] = abstract_id
            amap._counters[category] = max(amap._counters[category], int(index))
        return amap


class IdiomSet:
    """Frequent identifiers and literals kept verbatim during abstraction."""

    def __init__(self, entries=()):
        self.entries = frozenset(entries)

    def __contains__(self, raw):
        return raw in self.entries

    def __len__(self):
        return len(self.entries)

    def dump(self):
        return "".join(f"{_escape(e)}\n" for e in sorted(self.entries))

    @classmethod
    def parse(cls, text):
        return cls(_unescape(line) for line in text.splitlines() if line)

    def digest(self):
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()


def compute_idioms(method_records, top_n):
    """Count identifier/literal tokens across a corpus and keep the top n.

    Ties at the cutoff break lexicographically, so the result is a pure
    function of the corpus. Literals containing whitespace are never
    idioms: kept verbatim they would break the space-joined dataset and
    prediction formats, abstracted they round-trip through the map.
    Raises AbstractionError on an empty corpus.
    """
    if top_n < 0:
        raise AbstractionError("top_n must be non-negative")
    counts = {}
    saw_any = False
    for record in method_records:
        saw_any = True
        try:
            tokens = jlex.lex(record.source_text)
        except LexError as exc:
            raise AbstractionError(f"{record.file_path}: {exc}")
        for tok in tokens:
            if tok.kind == jlex.KIND_IDENTIFIER or tok.kind in CATEGORY_BY_LITERAL_KIND:
                if any(ch.isspace() for ch in tok.text):
                    continue
                counts[tok.text] = counts.get(tok.text, 0) + 1
    if not saw_any:
        raise AbstractionError("cannot compute idioms from an empty corpus")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return IdiomSet(text for text, _ in ranked[:top_n])


def _classify_identifier(tokens, i):
    """Pick VAR/METHOD/TYPE for the identifier at position ``i``."""
    prev_text = tokens[i - 1].text if i > 0 else ""
    next_tok = tokens[i + 1] if i + 1 < len(tokens) else None
    next_text = next_tok.text if next_tok else ""
    if prev_text == "@":
        return "TYPE"
    if prev_text == "new":
        return "TYPE"
    if next_text == "(":
        return "METHOD"
    if next_tok is not None and next_tok.kind in (
        jlex.KIND_IDENTIFIER,
        jlex.KIND_KEYWORD,
    ):
        # A name directly followed by another name is a type in a declaration.
        return "TYPE"
    if prev_text == ".":
        return "VAR"
    if tokens[i].text[:1].isupper():
        return "TYPE"
    return "VAR"


def abstract_tokens(lex_tokens, idioms, amap, line_offset=0):
    """Abstract a lexed token stream into an AbstractedMethod."""
    out = []
    lines = []
    for i, tok in enumerate(lex_tokens):
        line = tok.line + line_offset
        if tok.kind == jlex.KIND_KEYWORD:
            out.append(Token(tok.text, KIND_KEYWORD))
        elif tok.kind == jlex.KIND_PUNCTUATION:
            out.append(Token(tok.text, KIND_PUNCTUATION))
        elif tok.text in idioms:
            kind = (
                KIND_IDENTIFIER
                if tok.kind == jlex.KIND_IDENTIFIER
                else KIND_LITERAL
            )
            out.append(Token(tok.text, kind))
        elif tok.kind == jlex.KIND_IDENTIFIER:
            category = _classify_identifier(lex_tokens, i)
            out.append(Token(amap.assign(tok.text, category), KIND_ABSTRACT))
        elif tok.kind in CATEGORY_BY_LITERAL_KIND:
            category = CATEGORY_BY_LITERAL_KIND[tok.kind]
            out.append(Token(amap.assign(tok.text, category), KIND_ABSTRACT))
        else:
            raise AbstractionError(f"unexpected token kind {tok.kind!r}")
        lines.append(line)
    return AbstractedMethod(tuple(out), tuple(lines))


def abstract_source(source_text, idioms, amap, line_offset=0):
    """Lex and abstract a method's source text.

    ``line_offset`` shifts token line provenance back into file coordinates
    when the text was sliced out of a larger file.
    """
    try:
        tokens = jlex.lex(source_text)
    except LexError as exc:
        raise AbstractionError(f"lex failed: {exc}")
    return abstract_tokens(tokens, idioms, amap, line_offset)


def abstract_pair(before_source, after_source, idioms, before_offset=0, after_offset=0):
    """Abstract a submitted/revised method pair over one shared map.

    The submitted method is scanned first, so its tokens take the low IDs;
    tokens appearing only in the revision continue each category's sequence.
    """
    amap = AbstractionMap()
    before = abstract_source(before_source, idioms, amap, before_offset)
    after = abstract_source(after_source, idioms, amap, after_offset)
    return before, after, amap


def concretize(tokens, amap):
    """Invert abstraction, returning the raw token texts.

    Marker tokens are rejected; strip them before concretizing.
    """
    out = []
    for tok in tokens:
        if tok.kind == KIND_ABSTRACT:
            out.append(amap.raw_for(tok.text))
        elif tok.kind == KIND_SPECIAL:
            raise AbstractionError(f"cannot concretize marker {tok.text!r}")
        else:
            out.append(tok.text)
    return out


def span_indices(method, line_start, line_end):
    """Locate the token span covered by a comment's line range.

    Returns (first_index, last_index, used_fallback). When no token falls in
    the range (the comment sat on blank or stripped-comment lines), the
    nearest following token is used, or the nearest preceding one at the end
    of the method.
    """
    if not method.tokens:
        raise AbstractionError("cannot place a span in an empty method")
    hit = [i for i, line in enumerate(method.lines) if line_start <= line <= line_end]
    if hit:
        return hit[0], hit[-1], False
    following = [i for i, line in enumerate(method.lines) if line > line_end]
    if following:
        return following[0], following[0], True
    return len(method.tokens) - 1, len(method.tokens) - 1, True


def mark_span(method, line_start, line_end):
    """Insert <START>/<END> markers around the commented token span."""
    first, last, fallback = span_indices(method, line_start, line_end)
    tokens = (
        list(method.tokens[:first])
        + [START_MARKER]
        + list(method.tokens[first : last + 1])
        + [END_MARKER]
        + list(method.tokens[last + 1 :])
    )
    return tokens, fallback


def _strip_edge_punct(word):
    return _EDGE_PUNCT_RE.sub("", word)


def _looks_like_code(word):
    return bool(_CAMEL_RE.search(word)) or bool(_SNAKE_RE.search(word))


def abstract_comment(body, amap):
    """Rewrite a comment body using the pair's abstraction map.

    Whitespace-separated words matching a mapped raw token (exactly, or after
    trimming edge punctuation) become that token's ID; punctuation attached
    to a replaced word is dropped. Unmatched words that look like code
    references (camelCase or snake_case) become the _CODE_ placeholder.
    """
    out = []
    for word in body.split():
        if ABSTRACT_ID_RE.match(word) or word == CODE_WORD:
            out.append(word)
            continue
        mapped = amap.lookup_raw(word)
        if mapped is not None:
            out.append(mapped)
            continue
        core = _strip_edge_punct(word)
        if core:
            mapped = amap.lookup_raw(core)
            if mapped is not None:
                out.append(mapped)
                continue
            if _looks_like_code(core):
                out.append(CODE_WORD)
                continue
        out.append(word)
    return out


def normalize_comment(words, stopwords):
    """Clean an abstracted comment for dataset use.

    Abstract IDs and _CODE_ pass through untouched. URLs are removed, edge
    punctuation is trimmed, the rest is lowercased, and stopwords are
    dropped. An empty return value means the comment carried no content.
    """
    out = []
    for word in words:
        if ABSTRACT_ID_RE.match(word) or word == CODE_WORD:
            out.append(word)
            continue
        if _URL_RE.match(word):
            continue
        core = _strip_edge_punct(word)
        if not core:
            continue
        low = core.lower()
        if low in stopwords:
            continue
        out.append(low)
    return out
