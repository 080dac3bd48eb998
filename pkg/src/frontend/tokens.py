# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

from dataclasses import dataclass
from typing import Optional

from src.diagnostics import Span
from src.utils import StrEnum

__all__ = ["TokenKind", "Token", "KEYWORDS", "PUNCTUATION", "GROUP_ANNOTATION"]


class TokenKind(StrEnum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    INTEGER = "integer-literal"
    STRING = "string-literal"
    PUNCTUATION = "punctuation"
    ANNOTATION = "annotation-marker"
    EOF = "end-of-input"


KEYWORDS = frozenset(
    {
        "class",
        "extends",
        "static",
        "void",
        "int",
        "boolean",
        "string",
        "Collection",
        "new",
        "this",
        "super",
        "if",
        "else",
        "while",
        "for",
        "return",
        "print",
        "true",
        "false",
        "null",
    }
)

# Longest first, the lexer tries them in order.
PUNCTUATION = (
    "&&",
    "||",
    "==",
    "!=",
    "<=",
    ">=",
    "+=",
    "-=",
    "*=",
    "/=",
    "++",
    "--",
    "{",
    "}",
    "(",
    ")",
    "<",
    ">",
    "=",
    "+",
    "-",
    "*",
    "/",
    "!",
    ";",
    ",",
    ".",
    ":",
)

GROUP_ANNOTATION = "@group"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    # decoded payload for integer and string literals
    value: Optional[object] = None

    def is_(self, kind: TokenKind, lexeme: Optional[str] = None) -> bool:
        return self.kind == kind and (lexeme is None or self.lexeme == lexeme)

    def describe(self) -> str:
        if self.kind == TokenKind.EOF:
            return "end of input"
        return f"'{self.lexeme}'"
