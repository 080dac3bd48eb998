# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from src.diagnostics import Diagnostic, Span
from src.frontend.tokens import GROUP_ANNOTATION, KEYWORDS, PUNCTUATION, Token, TokenKind

__all__ = ["SourceUnit", "LexResult", "tokenize", "INT64_MAX"]

log = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")
_INTEGER = re.compile(r"[0-9]+")
_WHITESPACE = re.compile(r"[ \t\r\n]+")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class SourceUnit:
    path: str
    text: str

    @classmethod
    def from_file(cls, path: str | Path) -> "SourceUnit":
        with open(path, encoding="utf-8") as f:
            return cls(str(path), f.read())


@dataclass
class LexResult:
    tokens: list[Token]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class _Lexer:
    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.text = unit.text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.diagnostics: list[Diagnostic] = []

    def _span(self, start_line: int, start_col: int, lexeme: str) -> Span:
        lines = lexeme.split("\n")
        if len(lines) == 1:
            return Span(self.unit.path, start_line, start_col, start_line, start_col + max(len(lexeme), 1) - 1)
        return Span(self.unit.path, start_line, start_col, start_line + len(lines) - 1, max(len(lines[-1]), 1))

    def _advance(self, lexeme: str) -> None:
        self.pos += len(lexeme)
        newlines = lexeme.count("\n")
        if newlines:
            self.line += newlines
            self.col = len(lexeme) - lexeme.rfind("\n")
        else:
            self.col += len(lexeme)

    def _emit(self, kind: TokenKind, lexeme: str, value=None) -> None:
        self.tokens.append(Token(kind, lexeme, self._span(self.line, self.col, lexeme), value))
        self._advance(lexeme)

    def _error(self, lexeme: str, message: str) -> None:
        self.diagnostics.append(Diagnostic("E001", message, self._span(self.line, self.col, lexeme)))
        self._advance(lexeme)

    def run(self) -> LexResult:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]

            if m := _WHITESPACE.match(text, self.pos):
                self._advance(m.group())
                continue

            if text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self._advance(text[self.pos :] if end < 0 else text[self.pos : end])
                continue

            if ch == "@":
                m = _IDENT.match(text, self.pos + 1)
                lexeme = "@" + (m.group() if m else "")
                if lexeme == GROUP_ANNOTATION:
                    self._emit(TokenKind.ANNOTATION, lexeme)
                else:
                    self._error(lexeme, f"unknown annotation '{lexeme}', only '{GROUP_ANNOTATION}' is supported")
                continue

            if m := _IDENT.match(text, self.pos):
                word = m.group()
                self._emit(TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER, word)
                continue

            if m := _INTEGER.match(text, self.pos):
                digits = m.group()
                # 2**63 is only valid after a minus sign, which the parser checks
                if int(digits) > INT64_MAX + 1:
                    self._error(digits, f"integer literal {digits} does not fit in 64 bits")
                else:
                    self._emit(TokenKind.INTEGER, digits, int(digits))
                continue

            if ch == '"':
                self._string()
                continue

            for punct in PUNCTUATION:
                if text.startswith(punct, self.pos):
                    self._emit(TokenKind.PUNCTUATION, punct)
                    break
            else:
                self._error(ch, f"unexpected character {ch!r}")

        self.tokens.append(Token(TokenKind.EOF, "", Span(self.unit.path, self.line, self.col, self.line, self.col)))
        log.debug(f"Tokenized {self.unit.path}: {len(self.tokens)} tokens, {len(self.diagnostics)} diagnostics")
        return LexResult(self.tokens, self.diagnostics)

    def _string(self) -> None:
        text = self.text
        i = self.pos + 1
        chars = []
        while i < len(text) and text[i] not in '"\n':
            if text[i] == "\\" and i + 1 < len(text):
                escaped = _ESCAPES.get(text[i + 1])
                if escaped is None:
                    self._error(text[self.pos : i + 2], f"unknown escape sequence '\\{text[i + 1]}'")
                    return
                chars.append(escaped)
                i += 2
                continue
            chars.append(text[i])
            i += 1
        if i >= len(text) or text[i] != '"':
            self._error(text[self.pos : i], "unterminated string literal")
            return
        self._emit(TokenKind.STRING, text[self.pos : i + 1], "".join(chars))


def tokenize(unit: SourceUnit) -> LexResult:
    """Split a source unit into tokens terminated by an end-of-input sentinel.

    Lexical errors never abort the scan: the offending text is skipped and reported as an E001 diagnostic.
    """
    return _Lexer(unit).run()
