# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Enter pass: class, field and method symbols plus the inheritance graph."""

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from src.diagnostics import Diagnostic
from src.frontend.syntax import (
    COLLECTION_TYPE,
    PRIMITIVE_TYPES,
    Block,
    ClassDecl,
    ConstructorDecl,
    MethodDecl,
    Program,
    TypeExpr,
)
from src.utils import StrEnum

__all__ = [
    "OBJECT",
    "WRAPPER_SUFFIX",
    "PrimitiveType",
    "NullType",
    "ClassType",
    "CollectionType",
    "TypeRef",
    "INT",
    "BOOLEAN",
    "STRING",
    "VOID",
    "NULL",
    "MethodKind",
    "MethodSymbol",
    "ClassSymbol",
    "SymbolTable",
    "EnterResult",
    "enter",
    "superclass_chain",
    "is_subtype",
    "wrapper_name",
    "escape_copy_name",
]

log = logging.getLogger(__name__)

OBJECT = "Object"
WRAPPER_SUFFIX = "$Group"


def wrapper_name(element: str) -> str:
    return element + WRAPPER_SUFFIX


def escape_copy_name(selector: str, owner: str) -> str:
    """Name of the non-virtual copy of `owner.selector` that qualified-this calls reach in core code."""
    return f"{selector}${owner}"


# Types


@dataclass(frozen=True)
class PrimitiveType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class NullType:
    def __str__(self) -> str:
        return "null"


@dataclass(frozen=True)
class ClassType:
    name: str
    symbol: "ClassSymbol" = field(compare=False, repr=False, hash=False)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CollectionType:
    element: "TypeRef"

    def __str__(self) -> str:
        return f"{COLLECTION_TYPE}<{self.element}>"


TypeRef = Union[PrimitiveType, NullType, ClassType, CollectionType]

INT = PrimitiveType("int")
BOOLEAN = PrimitiveType("boolean")
STRING = PrimitiveType("string")
VOID = PrimitiveType("void")
NULL = NullType()
_PRIMITIVES = {t.name: t for t in (INT, BOOLEAN, STRING, VOID)}


# Symbols


class MethodKind(StrEnum):
    INSTANCE = "instance"
    GROUP = "group"
    STATIC = "static"
    SYNTHETIC_DELEGATION = "synthetic-delegation"
    CONSTRUCTOR = "constructor"


@dataclass(eq=False)
class MethodSymbol:
    selector: str
    kind: MethodKind
    params: list[tuple[str, TypeRef]]
    return_type: TypeRef
    body: Optional[Block]
    owner: "ClassSymbol"
    decl: Optional[Union[MethodDecl, ConstructorDecl]] = None

    @property
    def qualified_name(self) -> str:
        return f"{self.owner.name}.{self.selector}"

    @property
    def param_types(self) -> list[TypeRef]:
        return [t for _, t in self.params]

    def same_signature(self, other: "MethodSymbol") -> bool:
        return self.param_types == other.param_types and self.return_type == other.return_type

    def __repr__(self) -> str:
        return f"MethodSymbol({self.qualified_name}, {self.kind})"


@dataclass(eq=False)
class ClassSymbol:
    name: str
    superclass: Optional["ClassSymbol"] = None
    fields: dict[str, TypeRef] = field(default_factory=dict)
    instance_methods: dict[str, MethodSymbol] = field(default_factory=dict)
    group_methods: dict[str, MethodSymbol] = field(default_factory=dict)
    static_methods: dict[str, MethodSymbol] = field(default_factory=dict)
    constructor: Optional[MethodSymbol] = None
    wrapper: Optional["ClassSymbol"] = None
    is_synthetic: bool = False
    # for a synthetic wrapper, the element class it was generated for
    wrapped_element: Optional["ClassSymbol"] = None
    decl: Optional[ClassDecl] = None

    @property
    def is_object(self) -> bool:
        return self.superclass is None

    @property
    def type(self) -> ClassType:
        return ClassType(self.name, self)

    def selectors(self) -> set[str]:
        return set(self.instance_methods) | set(self.group_methods) | set(self.static_methods)

    def all_fields(self) -> dict[str, TypeRef]:
        """Own and inherited fields, root-most first."""
        merged: dict[str, TypeRef] = {}
        for cls in reversed(superclass_chain(self)):
            merged.update(cls.fields)
        return merged

    def lookup_field(self, name: str) -> Optional[tuple["ClassSymbol", TypeRef]]:
        for cls in superclass_chain(self):
            if name in cls.fields:
                return cls, cls.fields[name]
        return None

    def lookup_static(self, selector: str) -> Optional[MethodSymbol]:
        for cls in superclass_chain(self):
            if selector in cls.static_methods:
                return cls.static_methods[selector]
        return None

    def __repr__(self) -> str:
        return f"ClassSymbol({self.name})"


def superclass_chain(cls: ClassSymbol) -> list[ClassSymbol]:
    """[cls, super(cls), ..., Object]."""
    chain = [cls]
    while chain[-1].superclass is not None:
        chain.append(chain[-1].superclass)
    return chain


def is_subtype(a: TypeRef, b: TypeRef) -> bool:
    if a == b:
        return True
    if isinstance(a, NullType):
        return isinstance(b, (ClassType, CollectionType))
    if isinstance(a, ClassType) and isinstance(b, ClassType):
        return any(c.name == b.name for c in superclass_chain(a.symbol))
    # collections are invariant in their element type
    return False


class SymbolTable:
    def __init__(self):
        self.classes: dict[str, ClassSymbol] = {OBJECT: ClassSymbol(OBJECT)}

    @property
    def object(self) -> ClassSymbol:
        return self.classes[OBJECT]

    def __getitem__(self, name: str) -> ClassSymbol:
        return self.classes[name]

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def get(self, name: str) -> Optional[ClassSymbol]:
        return self.classes.get(name)

    def user_classes(self) -> Iterator[ClassSymbol]:
        return (c for c in self.classes.values() if not c.is_object)

    def subclasses(self, cls: ClassSymbol) -> list[ClassSymbol]:
        """Every class C with C ⊑ cls, including cls itself."""
        return [c for c in self.classes.values() if cls in superclass_chain(c)]

    def resolve_type(self, expr: TypeExpr, diagnostics: list[Diagnostic]) -> Optional[TypeRef]:
        if expr.name in _PRIMITIVES:
            return _PRIMITIVES[expr.name]
        if expr.name == COLLECTION_TYPE:
            arg = expr.argument
            if arg is None or arg.name in PRIMITIVE_TYPES or arg.name == COLLECTION_TYPE:
                diagnostics.append(
                    Diagnostic("E014", f"collection element type must be a class, found '{arg}'", expr.span)
                )
                return None
            element = self.resolve_type(arg, diagnostics)
            return None if element is None else CollectionType(element)
        if expr.name in self.classes:
            return self.classes[expr.name].type
        diagnostics.append(Diagnostic("E016", f"unknown type '{expr.name}'", expr.span))
        return None

    def copy(self) -> "SymbolTable":
        """Copy of the class graph that can be restructured without touching this table.

        Method symbols are shared; the per-class member maps are not.
        """
        clone = SymbolTable()
        for name, cls in self.classes.items():
            clone.classes[name] = ClassSymbol(
                name,
                fields=dict(cls.fields),
                instance_methods=dict(cls.instance_methods),
                group_methods=dict(cls.group_methods),
                static_methods=dict(cls.static_methods),
                constructor=cls.constructor,
                is_synthetic=cls.is_synthetic,
                decl=cls.decl,
            )
        for name, cls in self.classes.items():
            if cls.superclass is not None:
                clone.classes[name].superclass = clone.classes[cls.superclass.name]
            if cls.wrapper is not None:
                clone.classes[name].wrapper = clone.classes[cls.wrapper.name]
            if cls.wrapped_element is not None:
                clone.classes[name].wrapped_element = clone.classes[cls.wrapped_element.name]
        return clone


@dataclass
class EnterResult:
    table: SymbolTable
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class _Enter:
    def __init__(self, program: Program, core: bool):
        self.program = program
        self.core = core
        self.table = SymbolTable()
        self.diagnostics: list[Diagnostic] = []

    def error(self, code: str, message: str, span) -> None:
        self.diagnostics.append(Diagnostic(code, message, span))

    def run(self) -> EnterResult:
        decls = self.declare_classes()
        self.link_superclasses(decls)
        # parents before children, so inherited members are known when a subclass is entered
        for decl in sorted(decls, key=lambda d: len(superclass_chain(self.table[d.name]))):
            self.enter_members(decl)
        if self.core:
            self.link_wrappers()
        log.debug(f"Entered {len(decls)} classes with {len(self.diagnostics)} diagnostics")
        return EnterResult(self.table, self.diagnostics)

    def declare_classes(self) -> list[ClassDecl]:
        decls = []
        for decl in self.program.classes:
            if decl.name in self.table:
                self.error("E010", f"duplicate class '{decl.name}'", decl.span)
                continue
            self.table.classes[decl.name] = ClassSymbol(decl.name, is_synthetic="$" in decl.name, decl=decl)
            decls.append(decl)
        return decls

    def link_superclasses(self, decls: list[ClassDecl]) -> None:
        for decl in decls:
            cls = self.table[decl.name]
            parent_name = decl.superclass or OBJECT
            parent = self.table.get(parent_name)
            if parent is None:
                self.error("E011", f"unknown superclass '{parent_name}' of class '{decl.name}'", decl.span)
                parent = self.table.object
            cls.superclass = parent

        on_cycle = []
        for decl in decls:
            cls = self.table[decl.name]
            seen = [cls]
            current = cls.superclass
            while current is not None and current is not cls and current not in seen:
                seen.append(current)
                current = current.superclass
            if current is cls:
                path = " -> ".join(c.name for c in seen + [cls])
                self.error("E012", f"inheritance cycle: {path}", decl.span)
                on_cycle.append(cls)
        for cls in on_cycle:
            cls.superclass = self.table.object

    def enter_members(self, decl: ClassDecl) -> None:
        cls = self.table[decl.name]
        inherited = cls.superclass.all_fields() if cls.superclass is not None else {}
        for f in decl.fields:
            if f.name in cls.fields or f.name in inherited:
                self.error("E017", f"duplicate field '{f.name}' in class '{cls.name}'", f.span)
                continue
            type_ref = self.table.resolve_type(f.type, self.diagnostics)
            if type_ref is not None:
                cls.fields[f.name] = type_ref

        for c in decl.constructors:
            params = self.params(c.params)
            if cls.constructor is not None:
                self.error("E013", f"duplicate constructor in class '{cls.name}'", c.span)
                continue
            cls.constructor = MethodSymbol(c.name, MethodKind.CONSTRUCTOR, params, VOID, c.body, cls, c)

        for m in decl.methods:
            params = self.params(m.params)
            return_type = self.table.resolve_type(m.return_type, self.diagnostics) or VOID
            if m.name in cls.selectors():
                self.error("E013", f"duplicate method '{m.name}' in class '{cls.name}'", m.span)
                continue
            if m.is_group:
                kind, table = MethodKind.GROUP, cls.group_methods
            elif m.is_static:
                kind, table = MethodKind.STATIC, cls.static_methods
            elif self.core and cls.is_synthetic and self.is_delegation(cls, decl, m.name):
                kind, table = MethodKind.SYNTHETIC_DELEGATION, cls.instance_methods
            else:
                kind, table = MethodKind.INSTANCE, cls.instance_methods
            method = MethodSymbol(m.name, kind, params, return_type, m.body, cls, m)
            self.check_override(cls, method)
            table[m.name] = method

    def params(self, params) -> list[tuple[str, TypeRef]]:
        entered = []
        seen = set()
        for p in params:
            if p.name in seen:
                self.error("E013", f"duplicate parameter '{p.name}'", p.span)
            seen.add(p.name)
            if p.type.name == "void":
                self.error("E016", f"parameter '{p.name}' cannot have type void", p.type.span)
                continue
            type_ref = self.table.resolve_type(p.type, self.diagnostics)
            entered.append((p.name, type_ref if type_ref is not None else NULL))
        return entered

    @staticmethod
    def is_delegation(cls: ClassSymbol, decl: ClassDecl, selector: str) -> bool:
        from src.builtins import COLLECTION_BUILTINS

        return selector in COLLECTION_BUILTINS and any(f.name == "delegate" for f in decl.fields)

    def check_override(self, cls: ClassSymbol, method: MethodSymbol) -> None:
        if cls.superclass is None:
            return
        for ancestor in superclass_chain(cls.superclass):
            inherited = (
                ancestor.instance_methods.get(method.selector)
                or ancestor.group_methods.get(method.selector)
                or ancestor.static_methods.get(method.selector)
            )
            if inherited is None:
                continue
            same_table = (inherited.kind == MethodKind.GROUP) == (method.kind == MethodKind.GROUP)
            if not same_table:
                # group and instance methods live in separate tables and may share a selector
                continue
            if (inherited.kind == MethodKind.STATIC) != (method.kind == MethodKind.STATIC):
                self.error(
                    "E013",
                    f"'{method.qualified_name}' and '{inherited.qualified_name}' disagree on being static",
                    method.decl.span,
                )
            elif not method.same_signature(inherited) and not cls.is_synthetic:
                self.error(
                    "E013",
                    f"'{method.qualified_name}' overrides '{inherited.qualified_name}' with a different signature",
                    method.decl.span,
                )
            return

    def link_wrappers(self) -> None:
        for cls in self.table.user_classes():
            if cls.is_synthetic and cls.name.endswith(WRAPPER_SUFFIX):
                element = self.table.get(cls.name[: -len(WRAPPER_SUFFIX)])
                if element is not None:
                    cls.wrapped_element = element
                    element.wrapper = cls


def enter(program: Program, core: bool = False) -> EnterResult:
    """Build the symbol table for `program`.

    `core=True` enters a desugared program: classes whose names contain `$` are synthetic, a `X$Group` class is
    linked to its element class `X`, and its forwarding collection methods are entered as delegation methods.
    """
    return _Enter(program, core).run()
