"""Java source handling: lexing and method extraction."""

from reviewkit.java.lexer import LexToken, lex, line_kinds
from reviewkit.java.methods import extract_methods, match_methods

__all__ = ["LexToken", "lex", "line_kinds", "extract_methods", "match_methods"]
