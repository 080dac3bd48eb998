# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Source spans and structured compiler diagnostics.

Every phase of the pipeline reports problems as :class:`Diagnostic` values instead of raising, so a single run can
surface all of them. Callers that prefer exceptions wrap the list in a :class:`CompileError`.
"""

from dataclasses import dataclass, field
from typing import Iterable

from src.utils import StrEnum

__all__ = ["Span", "SYNTHETIC_SPAN", "Severity", "Diagnostic", "CompileError", "format_diagnostics", "has_errors"]


@dataclass(frozen=True)
class Span:
    """A 1-based, end-inclusive region of a source file."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"

    def to(self, other: "Span") -> "Span":
        """Span covering `self` through `other`."""
        return Span(self.file, self.start_line, self.start_col, other.end_line, other.end_col)


# Placeholder span for synthesized nodes that have no source text of their own.
SYNTHETIC_SPAN = Span("<synthetic>", 1, 1, 1, 1)


class Severity(StrEnum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span
    severity: Severity = Severity.ERROR
    notes: tuple[str, ...] = field(default=())

    def format(self) -> str:
        line = f"{self.span}: {self.severity}[{self.code}]: {self.message}"
        for note in self.notes:
            line += f"\n    note: {note}"
        return line

    def __str__(self) -> str:
        return self.format()


class CompileError(Exception):
    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__(format_diagnostics(self.diagnostics))


def format_diagnostics(diagnostics: Iterable[Diagnostic]) -> str:
    return "\n".join(d.format() for d in diagnostics)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity == Severity.ERROR for d in diagnostics)
