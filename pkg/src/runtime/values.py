# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

from dataclasses import dataclass, field
from typing import Union

from src.symbols import BOOLEAN, INT, STRING, ClassSymbol, TypeRef

__all__ = [
    "IntV",
    "BoolV",
    "StrV",
    "NullV",
    "NULL_V",
    "ObjectV",
    "CollectionV",
    "Value",
    "SwarmRuntimeError",
    "default_value",
    "stringify",
    "values_equal",
    "wrap_int",
]

_INT64_MIN = -(2**63)
_INT64_SPAN = 2**64


class SwarmRuntimeError(Exception):
    """A failure of the running SwarmLang program, reported as `runtime error: <message>`."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


def wrap_int(value: int) -> int:
    """Two's complement wrap-around into the signed 64-bit range."""
    return (value - _INT64_MIN) % _INT64_SPAN + _INT64_MIN


@dataclass(frozen=True)
class IntV:
    value: int


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class StrV:
    value: str


@dataclass(frozen=True)
class NullV:
    pass


NULL_V = NullV()


@dataclass(eq=False)
class ObjectV:
    cls: ClassSymbol
    fields: dict[str, "Value"] = field(default_factory=dict)

    def __repr__(self) -> str:
        return f"<{self.cls.name} object>"


@dataclass(eq=False)
class CollectionV:
    declared_element: ClassSymbol
    elements: list["Value"] = field(default_factory=list)

    def view(self, element: ClassSymbol) -> "CollectionV":
        """The same collection seen with a different declared element class; shares the element list."""
        return CollectionV(element, self.elements)

    def __repr__(self) -> str:
        return f"<Collection<{self.declared_element.name}> of {len(self.elements)}>"


Value = Union[IntV, BoolV, StrV, NullV, ObjectV, CollectionV]


def default_value(type_ref: TypeRef) -> Value:
    if type_ref == INT:
        return IntV(0)
    if type_ref == BOOLEAN:
        return BoolV(False)
    if type_ref == STRING:
        return StrV("")
    return NULL_V


def stringify(value: Value) -> str:
    match value:
        case IntV():
            return str(value.value)
        case BoolV():
            return "true" if value.value else "false"
        case StrV():
            return value.value
        case NullV():
            return "null"
    return repr(value)


def values_equal(left: Value, right: Value) -> bool:
    if isinstance(left, (IntV, BoolV, StrV, NullV)) or isinstance(right, (IntV, BoolV, StrV, NullV)):
        return left == right
    if isinstance(left, CollectionV) and isinstance(right, CollectionV):
        return left.elements is right.elements
    return left is right
