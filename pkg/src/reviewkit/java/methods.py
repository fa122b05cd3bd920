"""Method extraction from Java file versions and cross-version matching.

The extractor is a token-level scanner, not a full parser: it tracks the
nesting of type bodies, method bodies, and expression brackets well enough to
find every method declaration (including those inside nested, local, and
anonymous classes) with exact line spans.
"""

from __future__ import annotations

from collections import Counter

from reviewkit.errors import LexError, MethodExtractionError
from reviewkit.java.lexer import (
    KIND_IDENTIFIER,
    KIND_KEYWORD,
    lex,
)
from reviewkit.types import FileVersion, MethodPairing, MethodRecord, SkipRecord

_MODIFIERS = frozenset(
    """
    public protected private static final abstract synchronized native
    strictfp transient volatile default
    """.split()
)
_TYPE_KEYWORDS = frozenset({"class", "interface", "enum"})

# Fraction of shared tokens two unmatched methods need before they are
# treated as a rename of each other.
RENAME_OVERLAP_THRESHOLD = 0.60


def _angle_delta(text):
    if text == "<":
        return 1
    if text in (">", ">>", ">>>"):
        return -len(text)
    return 0


class _MethodScanner:
    def __init__(self, tokens, source, path):
        self.toks = tokens
        self.src = source
        self.path = path
        self.n = len(tokens)
        self.records = []

    def fail(self, message):
        raise MethodExtractionError(message, self.path)

    def text(self, i):
        return self.toks[i].text if i < self.n else ""

    # -- generic skipping helpers -------------------------------------------

    def _skip_parens(self, i):
        """i at '('; returns index just past the matching ')'."""
        depth = 0
        while i < self.n:
            t = self.text(i)
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        self.fail("unbalanced parentheses")

    def _skip_braces(self, i):
        """i at '{'; returns index just past the matching '}'.

        Used only where the braces cannot contain class bodies (annotation
        default arrays).
        """
        depth = 0
        while i < self.n:
            t = self.text(i)
            if t == "{":
                depth += 1
            elif t == "}":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        self.fail("unbalanced braces")

    def _skip_angles(self, i):
        """i at '<'; returns index just past the closing '>' run."""
        depth = 0
        while i < self.n:
            t = self.text(i)
            if t == "(":
                i = self._skip_parens(i)
                continue
            depth += _angle_delta(t)
            i += 1
            if depth <= 0:
                return i
        self.fail("unbalanced type parameters")

    def _skip_annotation(self, i):
        """i at '@'; returns index past the annotation (and its arguments)."""
        i += 1
        if self.text(i) == "interface":
            return None  # an @interface declaration, not a use
        if self.toks[i].kind != KIND_IDENTIFIER:
            self.fail(f"malformed annotation near line {self.toks[i].line}")
        i += 1
        while self.text(i) == ".":
            i += 2
        if self.text(i) == "(":
            i = self._skip_parens(i)
        return i

    # -- structural scanning -------------------------------------------------

    def scan_file(self):
        i = 0
        while i < self.n:
            tok = self.toks[i]
            if (
                tok.kind == KIND_KEYWORD
                and tok.text in _TYPE_KEYWORDS
                and (i == 0 or self.text(i - 1) != ".")
            ):
                i = self._enter_type(i)
            else:
                i += 1

    def _enter_type(self, i):
        """i at class/interface/enum keyword; scans the declaration."""
        kw = self.text(i)
        name = None
        j = i + 1
        if j < self.n and self.toks[j].kind == KIND_IDENTIFIER:
            name = self.toks[j].text
        while j < self.n and self.text(j) != "{":
            if self.text(j) == ";":  # e.g. `class` in a malformed header
                return j + 1
            j += 1
        if j >= self.n:
            self.fail(f"missing body for {kw} declaration")
        return self._scan_type_body(j, name, is_enum=(kw == "enum"))

    def _scan_type_body(self, i, type_name, is_enum):
        """i at '{' of a type body; returns index just past the matching '}'."""
        i += 1
        if is_enum:
            i = self._scan_enum_constants(i)
        while True:
            if i >= self.n:
                self.fail("unterminated type body")
            if self.text(i) == "}":
                return i + 1
            i = self._scan_member(i, type_name)

    def _scan_enum_constants(self, i):
        """Consume the constant list of an enum body.

        Stops after the ';' separating constants from members, or at the
        closing '}' when the enum has no member section.
        """
        while i < self.n:
            t = self.text(i)
            if t == ";":
                return i + 1
            if t == "}":
                return i
            if t == "(":
                i = self._skip_parens(i)
            elif t == "{":  # constant with a class body
                i = self._scan_type_body(i, None, is_enum=False)
            else:
                i += 1
        self.fail("unterminated enum body")

    def _scan_member(self, i, type_name):
        start = i
        if self.text(i) == ";":
            return i + 1
        # Annotations and modifiers, in any interleaving.
        while i < self.n:
            t = self.toks[i]
            if t.text == "@":
                skipped = self._skip_annotation(i)
                if skipped is None:  # @interface declaration
                    return self._enter_type(i + 1)
                i = skipped
            elif t.kind == KIND_KEYWORD and t.text in _MODIFIERS:
                i += 1
            else:
                break
        if self.text(i) == "<":
            i = self._skip_angles(i)
        # Walk the header to the first structural delimiter.
        j = i
        angle = 0
        while True:
            if j >= self.n:
                self.fail("unterminated member declaration")
            tok = self.toks[j]
            t = tok.text
            if tok.kind == KIND_KEYWORD and t in _TYPE_KEYWORDS:
                return self._enter_type(j)
            if angle > 0:
                if t == "(":
                    j = self._skip_parens(j)
                    continue
                angle += _angle_delta(t)
                j += 1
                continue
            if t == "(":
                return self._scan_callable(start, j, type_name)
            if t == "=":
                return self._scan_field_initializer(j + 1)
            if t == ";":
                return j + 1
            if t == "{":
                # Static or instance initializer block.
                end = self._walk_block(j + 1)
                return end + 1
            angle += _angle_delta(t)
            if angle < 0:
                angle = 0
            j += 1

    def _scan_callable(self, start, paren_idx, type_name):
        """Record a method or constructor whose '(' sits at ``paren_idx``."""
        name_tok = self.toks[paren_idx - 1]
        if name_tok.kind != KIND_IDENTIFIER:
            self.fail(
                f"expected method name before '(' at line {name_tok.line}"
            )
        params_end = self._skip_parens(paren_idx)
        param_tokens = self.toks[paren_idx + 1 : params_end - 1]
        # Scan past throws clauses (and annotation element defaults) to the
        # body or terminating ';'.
        t = params_end
        saw_default = False
        body_present = False
        pos = len(self.records)
        while True:
            if t >= self.n:
                self.fail("unterminated method declaration")
            text = self.text(t)
            if text == ";":
                end_idx = t
                break
            if text == "{":
                if saw_default:  # annotation element array default
                    t = self._skip_braces(t)
                    continue
                body_present = True
                end_idx = self._walk_block(t + 1)
                break
            if text == "default":
                saw_default = True
            t += 1
        name = name_tok.text
        arity, types = _parse_parameters(param_tokens)
        record = MethodRecord(
            file_path=self.path,
            name=name,
            signature_key=f"{name}({','.join(types)})",
            parameter_arity=arity,
            line_start=self.toks[start].line,
            line_end=self.toks[end_idx].line,
            source_text=self.src[self.toks[start].start : self.toks[end_idx].end],
            body_present=body_present,
        )
        # Insert before any records found inside the body so the list stays
        # in declaration order.
        self.records.insert(pos, record)
        return end_idx + 1

    def _scan_field_initializer(self, i):
        """i just past '='; walks to the terminating ';' at depth 0."""
        i = self._walk_expression(i, stop={";"})
        return i + 1

    def _walk_block(self, i):
        """Walk a brace block body from just inside its '{'.

        Returns the index of the matching '}'. Anonymous and local classes
        encountered on the way are scanned for methods.
        """
        return self._walk_expression(i, stop={"}"})

    def _walk_expression(self, i, stop):
        """Walk tokens until one of ``stop`` appears at bracket depth 0."""
        depth = 0
        while i < self.n:
            tok = self.toks[i]
            t = tok.text
            if depth == 0 and t in stop:
                return i
            if tok.kind == KIND_KEYWORD and t in _TYPE_KEYWORDS:
                if i > 0 and self.text(i - 1) == ".":  # Foo.class literal
                    i += 1
                    continue
                i = self._enter_type(i)
                continue
            if t == "{":
                if self._is_anonymous_class_body(i):
                    i = self._scan_type_body(i, None, is_enum=False)
                    continue
                depth += 1
            elif t in ("(", "["):
                depth += 1
            elif t in ("}", ")", "]"):
                depth -= 1
                if depth < 0:
                    self.fail(f"unbalanced {t!r} at line {tok.line}")
            i += 1
        self.fail("unterminated block or expression")

    def _is_anonymous_class_body(self, i):
        """True when the '{' at ``i`` opens `new Type(...) {` body."""
        j = i - 1
        if j < 0 or self.text(j) != ")":
            return False
        depth = 0
        while j >= 0:
            t = self.text(j)
            if t == ")":
                depth += 1
            elif t == "(":
                depth -= 1
                if depth == 0:
                    break
            j -= 1
        else:
            return False
        j -= 1  # token before the '('
        # Walk back across the constructed type: generics, then a possibly
        # qualified name, then the `new` keyword.
        if j >= 0 and self.text(j) in (">", ">>", ">>>"):
            bal = len(self.text(j))
            j -= 1
            while j >= 0 and bal > 0:
                bal -= _angle_delta(self.text(j))
                j -= 1
        if j < 0 or self.toks[j].kind != KIND_IDENTIFIER:
            return False
        j -= 1
        while j >= 1 and self.text(j) == "." and self.toks[j - 1].kind == KIND_IDENTIFIER:
            j -= 2
        return j >= 0 and self.text(j) == "new"


def _parse_parameters(tokens):
    """Return (arity, erased type strings) for a parameter token list."""
    parts = []
    cur = []
    angle = 0
    depth = 0
    i = 0
    while i < len(tokens):
        t = tokens[i].text
        if t == "(" or t == "[":
            depth += 1
        elif t == ")" or t == "]":
            depth -= 1
        angle += _angle_delta(t)
        if angle < 0:
            angle = 0
        if t == "," and angle == 0 and depth == 0:
            parts.append(cur)
            cur = []
        else:
            cur.append(tokens[i])
        i += 1
    if cur:
        parts.append(cur)

    types = []
    for part in parts:
        kept = []
        j = 0
        while j < len(part):
            tok = part[j]
            if tok.text == "@":  # parameter annotation
                j += 2
                while j < len(part) and part[j].text == ".":
                    j += 2
                if j < len(part) and part[j].text == "(":
                    bal = 0
                    while j < len(part):
                        if part[j].text == "(":
                            bal += 1
                        elif part[j].text == ")":
                            bal -= 1
                            if bal == 0:
                                j += 1
                                break
                        j += 1
                continue
            if tok.text == "final":
                j += 1
                continue
            if tok.text == "<":  # erase type arguments
                bal = 0
                while j < len(part):
                    bal += _angle_delta(part[j].text)
                    j += 1
                    if bal <= 0:
                        break
                continue
            kept.append(tok)
            j += 1
        if not kept:
            continue
        if kept[-1].text == "this":  # receiver parameter
            continue
        # The declarator name is the last identifier; everything else is type.
        name_idx = None
        for j in range(len(kept) - 1, -1, -1):
            if kept[j].kind == KIND_IDENTIFIER:
                name_idx = j
                break
        type_text = "".join(
            tok.text for j, tok in enumerate(kept) if j != name_idx
        )
        type_text = type_text.replace("...", "[]")
        types.append(type_text)
    return len(types), types


def extract_methods(file_version):
    """Find every method declaration in one file version.

    Raises MethodExtractionError (carrying the file path) when the source
    cannot be lexed or its bracket structure is broken.
    """
    try:
        tokens = lex(file_version.content)
    except LexError as exc:
        raise MethodExtractionError(f"lex failed: {exc}", file_version.path)
    scanner = _MethodScanner(tokens, file_version.content, file_version.path)
    try:
        scanner.scan_file()
    except IndexError:
        raise MethodExtractionError("truncated declaration", file_version.path)
    return scanner.records


def _token_overlap(a, b):
    try:
        ta = [t.text for t in lex(a.source_text)]
        tb = [t.text for t in lex(b.source_text)]
    except LexError:
        return 0.0
    longest = max(len(ta), len(tb))
    if longest == 0:
        return 0.0
    shared = sum((Counter(ta) & Counter(tb)).values())
    return shared / longest


def match_methods(before, after):
    """Pair method records across two versions of the same file.

    Methods pair on identical signature keys; duplicate keys (overload sets
    unchanged in size) pair in declaration order. When exactly one method on
    each side is left over, with equal arity and at least
    RENAME_OVERLAP_THRESHOLD shared tokens, the pair is kept as a rename.

    Returns (pairings, unmatched_before, unmatched_after).
    """
    by_key_after = {}
    for m in after:
        by_key_after.setdefault(m.signature_key, []).append(m)
    by_key_before = {}
    for m in before:
        by_key_before.setdefault(m.signature_key, []).append(m)

    pairings = []
    paired_after = set()
    unmatched_before = []
    for key, group_b in by_key_before.items():
        group_a = by_key_after.get(key, [])
        plural = len(group_b) > 1 or len(group_a) > 1
        for idx, m in enumerate(group_b):
            if idx < len(group_a):
                pairings.append(
                    MethodPairing(m, group_a[idx], "position" if plural else "signature")
                )
                paired_after.add(id(group_a[idx]))
            else:
                unmatched_before.append(m)
    unmatched_after = [m for m in after if id(m) not in paired_after]

    if len(unmatched_before) == 1 and len(unmatched_after) == 1:
        b, a = unmatched_before[0], unmatched_after[0]
        if (
            b.parameter_arity == a.parameter_arity
            and _token_overlap(b, a) >= RENAME_OVERLAP_THRESHOLD
        ):
            pairings.append(MethodPairing(b, a, "rename"))
            return pairings, [], []
    return pairings, unmatched_before, unmatched_after


def match_method_versions(before_files, after_files, skips=None):
    """Pair methods across two sets of file versions, file by file.

    Files are joined on path; methods within each shared file pair via
    match_methods. A file that fails extraction on either side contributes
    nothing; when ``skips`` is a list, a SkipRecord lands there, otherwise
    the extraction error propagates.
    """
    after_by_path = {f.path: f for f in after_files}
    pairings = []
    for before in before_files:
        after = after_by_path.get(before.path)
        if after is None:
            continue
        try:
            before_methods = extract_methods(before)
            after_methods = extract_methods(after)
        except MethodExtractionError as exc:
            if skips is None:
                raise
            skips.append(SkipRecord(path=exc.path, reason=str(exc)))
            continue
        matched, _, _ = match_methods(before_methods, after_methods)
        pairings.extend(matched)
    return pairings
