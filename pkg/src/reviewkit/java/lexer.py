"""A Java lexer that keeps enough provenance for abstraction and span marking.

Comments are stripped from the token stream but the lines they occupy are
remembered so callers can tell code lines from comment-only lines.
"""

from __future__ import annotations

from dataclasses import dataclass

from reviewkit.errors import LexError

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null
    """.split()
)

# Longest match first; every multi-character operator Java defines.
_OPERATORS = [
    ">>>=",
    "<<=",
    ">>=",
    ">>>",
    "...",
    "->",
    "::",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "&=",
    "|=",
    "^=",
    "%=",
    "<<",
    ">>",
]
_SINGLE = set("+-*/%=<>!&|^~?:;,.()[]{}@")

KIND_KEYWORD = "keyword"
KIND_IDENTIFIER = "identifier"
KIND_PUNCTUATION = "punctuation"
KIND_STRING = "string"
KIND_CHAR = "char"
KIND_INT = "int"
KIND_FLOAT = "float"

LITERAL_KINDS = frozenset({KIND_STRING, KIND_CHAR, KIND_INT, KIND_FLOAT})


@dataclass(frozen=True)
class LexToken:
    text: str
    kind: str
    line: int
    start: int  # character offset into the source, inclusive
    end: int  # character offset, exclusive


def _is_ident_start(ch):
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch):
    return ch.isalnum() or ch in "_$"


class _Scanner:
    def __init__(self, source):
        self.src = source
        self.n = len(source)
        self.i = 0
        self.line = 1
        self.tokens = []
        self.code_lines = set()
        self.comment_lines = set()

    def error(self, message):
        raise LexError(message, self.line)

    def peek(self, offset=0):
        # NUL sentinel at end-of-input: unlike "", it is never a substring
        # of a lookahead character class, so `peek() in "fFdD"` stays False.
        j = self.i + offset
        return self.src[j] if j < self.n else "\0"

    def _advance(self, count=1):
        for _ in range(count):
            if self.i < self.n:
                if self.src[self.i] == "\n":
                    self.line += 1
                self.i += 1

    def _emit(self, start, start_line, kind):
        text = self.src[start : self.i]
        self.tokens.append(LexToken(text, kind, start_line, start, self.i))
        for ln in range(start_line, self.line + 1):
            self.code_lines.add(ln)

    def run(self):
        while self.i < self.n:
            ch = self.src[self.i]
            if ch in " \t\r\n\f":
                self._advance()
            elif ch == "/" and self.peek(1) == "/":
                self._line_comment()
            elif ch == "/" and self.peek(1) == "*":
                self._block_comment()
            elif ch == '"':
                self._string()
            elif ch == "'":
                self._char()
            elif ch.isdigit() or (ch == "." and self.peek(1).isdigit()):
                self._number()
            elif _is_ident_start(ch):
                self._identifier()
            else:
                self._operator()
        return self.tokens

    def _line_comment(self):
        self.comment_lines.add(self.line)
        while self.i < self.n and self.src[self.i] != "\n":
            self._advance()

    def _block_comment(self):
        start_line = self.line
        self._advance(2)
        while self.i < self.n:
            if self.src[self.i] == "*" and self.peek(1) == "/":
                self._advance(2)
                for ln in range(start_line, self.line + 1):
                    self.comment_lines.add(ln)
                return
            self._advance()
        self.error("unterminated block comment")

    def _string(self):
        start = self.i
        start_line = self.line
        if self.peek(1) == '"' and self.peek(2) == '"':
            # Text block: scan to the closing triple quote.
            self._advance(3)
            while self.i < self.n:
                if (
                    self.src[self.i] == '"'
                    and self.peek(1) == '"'
                    and self.peek(2) == '"'
                ):
                    self._advance(3)
                    self._emit(start, start_line, KIND_STRING)
                    return
                if self.src[self.i] == "\\":
                    self._advance()
                self._advance()
            self.error("unterminated text block")
        self._advance()
        while self.i < self.n:
            ch = self.src[self.i]
            if ch == "\\":
                self._advance(2)
            elif ch == '"':
                self._advance()
                self._emit(start, start_line, KIND_STRING)
                return
            elif ch == "\n":
                self.error("unterminated string literal")
            else:
                self._advance()
        self.error("unterminated string literal")

    def _char(self):
        start = self.i
        start_line = self.line
        self._advance()
        while self.i < self.n:
            ch = self.src[self.i]
            if ch == "\\":
                self._advance(2)
            elif ch == "'":
                self._advance()
                self._emit(start, start_line, KIND_CHAR)
                return
            elif ch == "\n":
                self.error("unterminated character literal")
            else:
                self._advance()
        self.error("unterminated character literal")

    def _number(self):
        start = self.i
        start_line = self.line
        is_float = False
        if self.src[self.i] == "0" and self.peek(1) in "xX":
            self._advance(2)
            while self.i < self.n and (
                self.src[self.i] in "0123456789abcdefABCDEF_"
            ):
                self._advance()
            if self.peek() in "pP":  # hexadecimal floating point
                is_float = True
                self._advance()
                if self.peek() in "+-":
                    self._advance()
                while self.peek().isdigit() or self.peek() == "_":
                    self._advance()
        elif self.src[self.i] == "0" and self.peek(1) in "bB":
            self._advance(2)
            while self.peek() in "01_":
                self._advance()
        else:
            while self.peek().isdigit() or self.peek() == "_":
                self._advance()
            if self.peek() == "." and self.peek(1) != ".":
                # Greedy like javac: a dot after digits starts the fraction
                # (`1.`, `1.5`, `1.e3`); `..` never follows a number.
                is_float = True
                self._advance()
                while self.peek().isdigit() or self.peek() == "_":
                    self._advance()
            if self.peek() in "eE" and (
                self.peek(1).isdigit()
                or (self.peek(1) in "+-" and self.peek(2).isdigit())
            ):
                is_float = True
                self._advance()
                if self.peek() in "+-":
                    self._advance()
                while self.peek().isdigit() or self.peek() == "_":
                    self._advance()
        if self.peek() in "fFdD":
            is_float = True
            self._advance()
        elif self.peek() in "lL":
            self._advance()
        self._emit(start, start_line, KIND_FLOAT if is_float else KIND_INT)

    def _identifier(self):
        start = self.i
        start_line = self.line
        while self.i < self.n and _is_ident_part(self.src[self.i]):
            self._advance()
        text = self.src[start : self.i]
        kind = KIND_KEYWORD if text in KEYWORDS else KIND_IDENTIFIER
        self._emit(start, start_line, kind)

    def _operator(self):
        start = self.i
        start_line = self.line
        for op in _OPERATORS:
            if self.src.startswith(op, self.i):
                self._advance(len(op))
                self._emit(start, start_line, KIND_PUNCTUATION)
                return
        ch = self.src[self.i]
        if ch in _SINGLE:
            self._advance()
            self._emit(start, start_line, KIND_PUNCTUATION)
            return
        self.error(f"unexpected character {ch!r}")


def lex(source):
    """Tokenize Java source text, raising LexError on malformed input."""
    return _Scanner(source).run()


def line_kinds(source):
    """Classify each line of ``source``.

    Returns ``(code_lines, comment_lines)`` as sets of 1-based line numbers.
    A line can appear in both sets (trailing comment after code); a line in
    neither set is blank.
    """
    scanner = _Scanner(source)
    scanner.run()
    return scanner.code_lines, scanner.comment_lines
