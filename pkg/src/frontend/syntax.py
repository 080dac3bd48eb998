# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Syntax tree for SwarmLang programs.

Nodes are plain dataclasses. Spans never take part in equality, so two trees compare equal when they are structurally
identical regardless of where they came from (source text, the emitter or the desugarer).
"""

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Union

from src.diagnostics import SYNTHETIC_SPAN, Span

__all__ = [
    "Node",
    "TypeExpr",
    "Program",
    "ClassDecl",
    "FieldDecl",
    "Param",
    "MethodDecl",
    "ConstructorDecl",
    "Stmt",
    "Block",
    "LocalDecl",
    "Assign",
    "ExprStmt",
    "SuperConstructorCall",
    "If",
    "While",
    "For",
    "ForEach",
    "Return",
    "Print",
    "Expr",
    "IntLit",
    "BoolLit",
    "StrLit",
    "NullLit",
    "This",
    "QualifiedThis",
    "Name",
    "FieldAccess",
    "Call",
    "SuperCall",
    "New",
    "NewCollection",
    "Unary",
    "Binary",
    "walk",
    "PRIMITIVE_TYPES",
    "COLLECTION_TYPE",
]

PRIMITIVE_TYPES = ("int", "boolean", "string", "void")
COLLECTION_TYPE = "Collection"


@dataclass
class Node:
    span: Span = field(default=SYNTHETIC_SPAN, compare=False, repr=False, kw_only=True)


@dataclass
class TypeExpr(Node):
    name: str
    argument: Optional["TypeExpr"] = None

    def __str__(self) -> str:
        return self.name if self.argument is None else f"{self.name}<{self.argument}>"


# Expressions


@dataclass
class IntLit(Node):
    value: int


@dataclass
class BoolLit(Node):
    value: bool


@dataclass
class StrLit(Node):
    value: str


@dataclass
class NullLit(Node):
    pass


@dataclass
class This(Node):
    pass


@dataclass
class QualifiedThis(Node):
    """`T.this`, only meaningful as the receiver of a call inside a group method."""

    qualifier: str


@dataclass
class Name(Node):
    name: str


@dataclass
class FieldAccess(Node):
    target: "Expr"
    name: str


@dataclass
class Call(Node):
    # None for an unqualified call `m(args)`
    receiver: Optional["Expr"]
    name: str
    args: list["Expr"] = field(default_factory=list)


@dataclass
class SuperCall(Node):
    name: str
    args: list["Expr"] = field(default_factory=list)


@dataclass
class New(Node):
    class_name: str
    args: list["Expr"] = field(default_factory=list)


@dataclass
class NewCollection(Node):
    element: TypeExpr


@dataclass
class Unary(Node):
    op: str
    operand: "Expr"


@dataclass
class Binary(Node):
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[
    IntLit, BoolLit, StrLit, NullLit, This, QualifiedThis, Name, FieldAccess,
    Call, SuperCall, New, NewCollection, Unary, Binary,
]


# Statements


@dataclass
class Block(Node):
    statements: list["Stmt"] = field(default_factory=list)


@dataclass
class LocalDecl(Node):
    type: TypeExpr
    name: str
    init: Optional[Expr] = None


@dataclass
class Assign(Node):
    target: Expr
    op: str
    value: Expr


@dataclass
class ExprStmt(Node):
    expr: Expr


@dataclass
class SuperConstructorCall(Node):
    args: list[Expr] = field(default_factory=list)


@dataclass
class If(Node):
    condition: Expr
    then: Block
    otherwise: Optional[Block] = None


@dataclass
class While(Node):
    condition: Expr
    body: Block


@dataclass
class For(Node):
    init: Optional["Stmt"]
    condition: Optional[Expr]
    update: Optional["Stmt"]
    body: Block


@dataclass
class ForEach(Node):
    type: TypeExpr
    name: str
    iterable: Expr
    body: Block


@dataclass
class Return(Node):
    value: Optional[Expr] = None


@dataclass
class Print(Node):
    value: Expr


Stmt = Union[Block, LocalDecl, Assign, ExprStmt, SuperConstructorCall, If, While, For, ForEach, Return, Print]


# Declarations


@dataclass
class FieldDecl(Node):
    type: TypeExpr
    name: str


@dataclass
class Param(Node):
    type: TypeExpr
    name: str


@dataclass
class MethodDecl(Node):
    name: str
    params: list[Param]
    return_type: TypeExpr
    body: Block
    is_group: bool = False
    is_static: bool = False


@dataclass
class ConstructorDecl(Node):
    name: str
    params: list[Param]
    body: Block


@dataclass
class ClassDecl(Node):
    name: str
    superclass: Optional[str] = None
    fields: list[FieldDecl] = field(default_factory=list)
    constructors: list[ConstructorDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)

    @property
    def file(self) -> str:
        return self.span.file


@dataclass
class Program(Node):
    classes: list[ClassDecl] = field(default_factory=list)

    def files(self) -> list[str]:
        """Source files in first-appearance order."""
        return list(dict.fromkeys(c.file for c in self.classes))


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal over `node` and every node below it, in source order."""
    yield node
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield from walk(value)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Node):
                    yield from walk(item)
