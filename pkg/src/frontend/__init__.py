# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

from src.frontend.lexer import INT64_MAX, LexResult, SourceUnit, tokenize
from src.frontend.parser import ParseResult, parse
from src.frontend.tokens import GROUP_ANNOTATION, KEYWORDS, Token, TokenKind

__all__ = [
    "INT64_MAX",
    "LexResult",
    "SourceUnit",
    "tokenize",
    "ParseResult",
    "parse",
    "GROUP_ANNOTATION",
    "KEYWORDS",
    "Token",
    "TokenKind",
]
