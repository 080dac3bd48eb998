# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Attribution pass: name resolution, typing and call classification.

Every expression gets a :data:`TypeRef` and every call a :data:`Resolution`. Group calls are resolved against the
static element type of the receiving collection; under the dynamic lookup policy a call that only subclasses of the
declared element can answer is deferred to run time.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from src.builtins import COLLECTION_BUILTINS
from src.diagnostics import SYNTHETIC_SPAN, Diagnostic, Span
from src.frontend.syntax import (
    COLLECTION_TYPE,
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    ClassDecl,
    ConstructorDecl,
    Expr,
    ExprStmt,
    FieldAccess,
    For,
    ForEach,
    If,
    IntLit,
    LocalDecl,
    MethodDecl,
    Name,
    New,
    NewCollection,
    NullLit,
    Print,
    Program,
    QualifiedThis,
    Return,
    Stmt,
    StrLit,
    SuperCall,
    SuperConstructorCall,
    This,
    TypeExpr,
    Unary,
    While,
    walk,
)
from src.symbols import (
    BOOLEAN,
    INT,
    NULL,
    STRING,
    VOID,
    ClassSymbol,
    ClassType,
    CollectionType,
    MethodKind,
    MethodSymbol,
    NullType,
    PrimitiveType,
    SymbolTable,
    TypeRef,
    is_subtype,
    superclass_chain,
)
from src.utils import StrEnum

__all__ = [
    "LookupPolicy",
    "InstanceCall",
    "StaticCall",
    "GroupCall",
    "GroupEscapeCall",
    "DeferredGroupCall",
    "SuperMethodCall",
    "BuiltinCollectionCall",
    "Resolution",
    "NameBinding",
    "TypedAst",
    "AttributionResult",
    "least_upper_bound",
    "lookup_instance",
    "lookup_group",
    "resolve_call",
    "resolve_group_escape",
    "attribute",
    "assignable",
]

log = logging.getLogger(__name__)


class LookupPolicy(StrEnum):
    STATIC = "static"
    DYNAMIC = "dynamic"


# Resolutions


@dataclass(frozen=True)
class InstanceCall:
    target: MethodSymbol


@dataclass(frozen=True)
class StaticCall:
    target: MethodSymbol


@dataclass(frozen=True)
class GroupCall:
    element: ClassSymbol
    target: MethodSymbol
    defining: ClassSymbol


@dataclass(frozen=True)
class GroupEscapeCall:
    element: ClassSymbol
    target: MethodSymbol
    defining: ClassSymbol


@dataclass(frozen=True)
class DeferredGroupCall:
    """A group call only some subclass of the declared element answers; settled by Swarm-Lookup at run time."""

    element: ClassSymbol
    selector: str
    signature: MethodSymbol


@dataclass(frozen=True)
class SuperMethodCall:
    target: MethodSymbol


@dataclass(frozen=True)
class BuiltinCollectionCall:
    selector: str


Resolution = Union[
    InstanceCall, StaticCall, GroupCall, GroupEscapeCall, DeferredGroupCall, SuperMethodCall, BuiltinCollectionCall
]


class NameBinding(StrEnum):
    LOCAL = "local"
    FIELD = "field"
    CLASS = "class"


@dataclass
class TypedAst:
    """A program plus the side tables attribution computed for it, keyed by node identity."""

    program: Program
    table: SymbolTable
    policy: LookupPolicy = LookupPolicy.STATIC
    types: dict[int, TypeRef] = field(default_factory=dict)
    resolutions: dict[int, Resolution] = field(default_factory=dict)
    names: dict[int, NameBinding] = field(default_factory=dict)
    group_contexts: dict[int, ClassSymbol] = field(default_factory=dict)

    def type_of(self, expr: Expr) -> Optional[TypeRef]:
        return self.types.get(id(expr))

    def resolution_of(self, call: Union[Call, SuperCall]) -> Optional[Resolution]:
        return self.resolutions.get(id(call))

    def binding_of(self, name: Name) -> Optional[NameBinding]:
        return self.names.get(id(name))

    def group_context(self, method: MethodDecl) -> Optional[ClassSymbol]:
        return self.group_contexts.get(id(method))

    def group_calls(self) -> list[tuple[Call, Resolution]]:
        found = []
        for node in walk(self.program):
            res = self.resolutions.get(id(node))
            if isinstance(res, (GroupCall, GroupEscapeCall, DeferredGroupCall)) or (
                isinstance(res, SuperMethodCall) and res.target.kind == MethodKind.GROUP
            ):
                found.append((node, res))
        return found

    def summary(self) -> list[tuple[str, str, str]]:
        """Node kind, type and resolution for every node in traversal order; equal summaries mean equal attribution."""
        rows = []
        for node in walk(self.program):
            key = id(node)
            rows.append((type(node).__name__, str(self.types.get(key, "")), _describe(self.resolutions.get(key))))
        return rows


def _describe(res: Optional[Resolution]) -> str:
    if res is None:
        return ""
    if isinstance(res, BuiltinCollectionCall):
        return f"builtin {res.selector}"
    if isinstance(res, DeferredGroupCall):
        return f"deferred {res.element.name}.{res.selector}"
    if isinstance(res, (GroupCall, GroupEscapeCall)):
        return f"{type(res).__name__} {res.element.name} -> {res.target.qualified_name}"
    return f"{type(res).__name__} {res.target.qualified_name}"


@dataclass
class AttributionResult:
    typed: TypedAst
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not self.diagnostics


# Lookup procedures


def least_upper_bound(classes: Iterable[ClassSymbol]) -> ClassSymbol:
    """The most specific common superclass of `classes`: widen a candidate until every input lies below it."""
    classes = list(classes)
    if not classes:
        raise ValueError("Not sure how to compute the least upper bound of an empty set of classes")
    bound = classes[0]
    for cls in classes[1:]:
        while bound not in superclass_chain(cls):
            bound = bound.superclass
    return bound


def lookup_instance(cls: ClassSymbol, selector: str) -> Optional[MethodSymbol]:
    for current in superclass_chain(cls):
        if selector in current.instance_methods:
            return current.instance_methods[selector]
    return None


def lookup_group(start: ClassSymbol, selector: str) -> Optional[tuple[MethodSymbol, ClassSymbol]]:
    for current in superclass_chain(start):
        if selector in current.group_methods:
            return current.group_methods[selector], current
    return None


def _element_class(collection: CollectionType) -> Optional[ClassSymbol]:
    return collection.element.symbol if isinstance(collection.element, ClassType) else None


def _deferred_candidates(element: ClassSymbol, selector: str, table: SymbolTable) -> list[MethodSymbol]:
    return [c.group_methods[selector] for c in table.subclasses(element) if selector in c.group_methods]


def resolve_call(
    receiver_type: TypeRef,
    selector: str,
    arg_types: list[TypeRef],
    *,
    span: Span = SYNTHETIC_SPAN,
    table: Optional[SymbolTable] = None,
    policy: LookupPolicy = LookupPolicy.STATIC,
) -> Union[Resolution, Diagnostic]:
    """Classify a call `recv.selector(args)` given the receiver's static type.

    Builtin collection methods shadow group methods of the same selector; otherwise group lookup starts at the
    collection's declared element class.
    """
    if isinstance(receiver_type, ClassType):
        target = lookup_instance(receiver_type.symbol, selector)
        if target is None:
            notes = ()
            if lookup_group(receiver_type.symbol, selector) is not None:
                notes = (f"'{selector}' is a group method; call it on a Collection<{receiver_type.name}>",)
            message = f"no instance method '{selector}' in class '{receiver_type.name}'"
            return Diagnostic("E020", message, span, notes=notes)
        return _check_call(InstanceCall(target), target, arg_types, span)

    if isinstance(receiver_type, CollectionType):
        element = _element_class(receiver_type)
        builtin = COLLECTION_BUILTINS.get(selector)
        if builtin is not None:
            return _check_args(
                BuiltinCollectionCall(selector), selector, builtin.param_types(receiver_type.element), arg_types, span
            )
        found = lookup_group(element, selector) if element is not None else None
        if found is not None:
            target, defining = found
            return _check_call(GroupCall(element, target, defining), target, arg_types, span)
        if policy == LookupPolicy.DYNAMIC and element is not None and table is not None:
            candidates = _deferred_candidates(element, selector, table)
            if candidates and all(c.same_signature(candidates[0]) for c in candidates):
                signature = candidates[0]
                return _check_args(
                    DeferredGroupCall(element, selector, signature), selector, signature.param_types, arg_types, span
                )
        notes = ()
        if element is not None and table is not None:
            owners = [c.owner.name for c in _deferred_candidates(element, selector, table)]
            if owners:
                notes = (f"declared on {', '.join(owners)}, below the declared element type '{element.name}'",)
        message = f"no group method '{selector}' for element type '{receiver_type.element}'"
        return Diagnostic("E021", message, span, notes=notes)

    return Diagnostic("E020", f"cannot call method '{selector}' on a value of type '{receiver_type}'", span)


def resolve_group_escape(
    context: ClassSymbol,
    qualifier: Optional[ClassSymbol],
    selector: str,
    arg_types: list[TypeRef] = (),
    *,
    qualifier_name: Optional[str] = None,
    span: Span = SYNTHETIC_SPAN,
) -> Union[Resolution, Diagnostic]:
    """`T.this.selector(args)` inside a group method of `context`: group lookup from T, then builtin delegation."""
    name = qualifier_name or (qualifier.name if qualifier is not None else "?")
    if qualifier is None or qualifier not in superclass_chain(context):
        return Diagnostic("E025", f"'{name}.this' must name '{context.name}' or one of its superclasses", span)
    found = lookup_group(qualifier, selector)
    if found is not None:
        target, defining = found
        return _check_call(GroupEscapeCall(qualifier, target, defining), target, list(arg_types), span)
    builtin = COLLECTION_BUILTINS.get(selector)
    if builtin is not None:
        params = builtin.param_types(context.type)
        return _check_args(BuiltinCollectionCall(selector), selector, params, list(arg_types), span)
    return Diagnostic("E021", f"no group method '{selector}' for element type '{qualifier.name}'", span)


def _check_call(resolution: Resolution, target: MethodSymbol, arg_types: list[TypeRef], span: Span):
    return _check_args(resolution, target.qualified_name, target.param_types, arg_types, span)


def _check_args(
    resolution: Resolution,
    name: str,
    param_types: list[TypeRef],
    arg_types: list[TypeRef],
    span: Span,
    widen_collections: bool = False,
) -> Union[Resolution, Diagnostic]:
    if len(param_types) != len(arg_types):
        return Diagnostic("E023", f"'{name}' expects {len(param_types)} arguments, found {len(arg_types)}", span)
    for i, (param, arg) in enumerate(zip(param_types, arg_types)):
        if arg is not None and not assignable(arg, param, widen_collections):
            return Diagnostic("E022", f"argument {i + 1} of '{name}' expects {param}, found {arg}", span)
    return resolution


def assignable(value: TypeRef, target: TypeRef, widen_collections: bool = False) -> bool:
    """Can a value of type `value` be stored where `target` is expected?

    `widen_collections` lets `Collection<S>` pass for `Collection<E>` when S ⊑ E; only wrapper constructors use it.
    """
    if is_subtype(value, target):
        return True
    if widen_collections and isinstance(value, CollectionType) and isinstance(target, CollectionType):
        return is_subtype(value.element, target.element)
    return False


def _wrapper_root_element(wrapper: ClassSymbol) -> Optional[ClassSymbol]:
    for cls in superclass_chain(wrapper):
        delegate = cls.fields.get("delegate")
        if isinstance(delegate, CollectionType) and isinstance(delegate.element, ClassType):
            return delegate.element.symbol
    return None


def _substitute(t: TypeRef, old: ClassSymbol, new: ClassSymbol) -> TypeRef:
    if isinstance(t, ClassType) and t.symbol is old:
        return new.type
    if isinstance(t, CollectionType):
        return CollectionType(_substitute(t.element, old, new))
    return t


def _specialize(t: TypeRef, receiver: ClassSymbol) -> TypeRef:
    """Type of a wrapper delegation member seen through a wrapper for a more specific element class."""
    if not receiver.is_synthetic or receiver.wrapped_element is None:
        return t
    root = _wrapper_root_element(receiver)
    if root is None:
        return t
    return _substitute(t, root, receiver.wrapped_element)


# The pass


@dataclass
class _Context:
    cls: ClassSymbol
    method: MethodSymbol
    scopes: list[dict[str, TypeRef]] = field(default_factory=list)

    @property
    def is_group(self) -> bool:
        return self.method.kind == MethodKind.GROUP

    @property
    def is_static(self) -> bool:
        return self.method.kind == MethodKind.STATIC

    @property
    def is_constructor(self) -> bool:
        return self.method.kind == MethodKind.CONSTRUCTOR

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def lookup(self, name: str) -> Optional[TypeRef]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name: str, type_ref: TypeRef) -> bool:
        if self.lookup(name) is not None:
            return False
        self.scopes[-1][name] = type_ref
        return True


class _Attributor:
    def __init__(self, program: Program, table: SymbolTable, policy: LookupPolicy):
        self.typed = TypedAst(program, table, policy)
        self.table = table
        self.policy = policy
        self.diagnostics: list[Diagnostic] = []
        self.ctx: Optional[_Context] = None

    def error(self, code: str, message: str, span: Span, notes: tuple[str, ...] = ()) -> None:
        self.diagnostics.append(Diagnostic(code, message, span, notes=notes))

    def record(self, expr: Expr, type_ref: Optional[TypeRef]) -> Optional[TypeRef]:
        if type_ref is not None:
            self.typed.types[id(expr)] = type_ref
        return type_ref

    def run(self) -> AttributionResult:
        for decl in self.typed.program.classes:
            cls = self.table.get(decl.name)
            if cls is None or cls.decl is not decl:
                # duplicate class, already reported by enter
                continue
            self.attribute_class(cls, decl)
        log.debug(f"Attributed {len(self.typed.types)} expressions, {len(self.typed.resolutions)} calls")
        return AttributionResult(self.typed, self.diagnostics)

    def attribute_class(self, cls: ClassSymbol, decl: ClassDecl) -> None:
        self.implicit_super(cls, decl)
        if decl.constructors and cls.constructor is not None and cls.constructor.decl is decl.constructors[0]:
            self.attribute_body(cls, cls.constructor, decl.constructors[0])
        for m in decl.methods:
            method = cls.instance_methods.get(m.name) or cls.group_methods.get(m.name) or cls.static_methods.get(m.name)
            if method is None or method.decl is not m:
                continue
            if method.kind == MethodKind.GROUP:
                self.typed.group_contexts[id(m)] = cls
            self.attribute_body(cls, method, m)

    def implicit_super(self, cls: ClassSymbol, decl: ClassDecl) -> None:
        """Without a leading `super(...)` the parent constructor runs with no arguments, so it must take none."""
        parent = cls.superclass
        if parent is None or parent.constructor is None or not parent.constructor.params:
            return
        ctor = decl.constructors[0] if decl.constructors else None
        if ctor is not None and ctor.body.statements and isinstance(ctor.body.statements[0], SuperConstructorCall):
            return
        expects = len(parent.constructor.params)
        message = f"'{parent.name} constructor' expects {expects} arguments, found 0; call super(...) explicitly"
        self.error("E023", message, ctor.span if ctor is not None else decl.span)

    def attribute_body(self, cls: ClassSymbol, method: MethodSymbol, decl: Union[MethodDecl, ConstructorDecl]) -> None:
        self.ctx = _Context(cls, method)
        self.ctx.push()
        for name, type_ref in method.params:
            self.ctx.declare(name, type_ref)
        for i, statement in enumerate(decl.body.statements):
            if isinstance(statement, SuperConstructorCall):
                self.super_constructor(statement, first=i == 0)
            else:
                self.statement(statement)
        self.ctx = None

    # Statements

    def block(self, block: Block) -> None:
        self.ctx.push()
        for statement in block.statements:
            self.statement(statement)
        self.ctx.pop()

    def statement(self, stmt: Stmt) -> None:
        match stmt:
            case Block():
                self.block(stmt)
            case LocalDecl():
                self.local_decl(stmt)
            case Assign():
                self.assign(stmt)
            case ExprStmt():
                self.expression(stmt.expr)
            case SuperConstructorCall():
                self.super_constructor(stmt, first=False)
            case If():
                self.condition(stmt.condition)
                self.block(stmt.then)
                if stmt.otherwise is not None:
                    self.block(stmt.otherwise)
            case While():
                self.condition(stmt.condition)
                self.block(stmt.body)
            case For():
                self.ctx.push()
                if stmt.init is not None:
                    self.statement(stmt.init)
                if stmt.condition is not None:
                    self.condition(stmt.condition)
                if stmt.update is not None:
                    self.statement(stmt.update)
                self.block(stmt.body)
                self.ctx.pop()
            case ForEach():
                self.for_each(stmt)
            case Return():
                self.return_(stmt)
            case Print():
                value = self.expression(stmt.value)
                if value is not None and value not in (INT, STRING):
                    self.error("E029", f"print expects int or string, found {value}", stmt.value.span)
            case _:
                raise TypeError(f"Not sure how to attribute statement {type(stmt).__name__}")

    def local_decl(self, stmt: LocalDecl) -> None:
        declared = self.table.resolve_type(stmt.type, self.diagnostics)
        if stmt.init is not None:
            value = self.expression(stmt.init)
            if declared is not None and value is not None and not assignable(value, declared):
                self.error("E030", f"cannot initialize '{stmt.name}' of type {declared} with {value}", stmt.init.span)
        if declared is None:
            declared = NULL
        if not self.ctx.declare(stmt.name, declared):
            self.error("E013", f"variable '{stmt.name}' is already defined", stmt.span)

    def assign(self, stmt: Assign) -> None:
        target = self.expression(stmt.target)
        value = self.expression(stmt.value)
        if target is None or value is None:
            return
        if stmt.op == "=":
            if not assignable(value, target):
                self.error("E030", f"cannot assign {value} to a target of type {target}", stmt.span)
        elif stmt.op == "+=" and target == STRING:
            if not self.concatenable(value):
                self.error("E029", f"cannot append {value} to a string", stmt.span)
        elif target != INT or value != INT:
            self.error("E029", f"'{stmt.op}' needs int operands, found {target} and {value}", stmt.span)

    def condition(self, expr: Expr) -> None:
        type_ref = self.expression(expr)
        if type_ref is not None and type_ref != BOOLEAN:
            self.error("E028", f"condition must be boolean, found {type_ref}", expr.span)

    def for_each(self, stmt: ForEach) -> None:
        iterable = self.expression(stmt.iterable)
        declared = self.table.resolve_type(stmt.type, self.diagnostics)
        if iterable is not None and not isinstance(iterable, CollectionType):
            self.error("E029", f"for-each needs a collection, found {iterable}", stmt.iterable.span)
        elif iterable is not None and declared is not None and not assignable(iterable.element, declared):
            self.error("E030", f"cannot iterate {iterable} with a variable of type {declared}", stmt.span)
        self.ctx.push()
        self.ctx.declare(stmt.name, declared or NULL)
        self.block(stmt.body)
        self.ctx.pop()

    def return_(self, stmt: Return) -> None:
        expected = self.ctx.method.return_type
        if stmt.value is None:
            if expected != VOID:
                self.error("E030", f"'{self.ctx.method.qualified_name}' must return {expected}", stmt.span)
            return
        value = self.expression(stmt.value)
        if expected == VOID:
            self.error("E030", f"'{self.ctx.method.qualified_name}' returns void, cannot return a value", stmt.span)
        elif value is not None and not assignable(value, expected):
            self.error("E030", f"cannot return {value} from a method returning {expected}", stmt.value.span)

    def super_constructor(self, stmt: SuperConstructorCall, first: bool) -> None:
        arg_types = [self.expression(a) for a in stmt.args]
        if not (self.ctx.is_constructor and first):
            self.error("E032", "'super(...)' is only allowed as the first statement of a constructor", stmt.span)
            return
        parent = self.ctx.cls.superclass
        ctor = parent.constructor if parent is not None else None
        params = ctor.param_types if ctor is not None else []
        result = _check_args(
            None, f"{parent.name} constructor", params, arg_types, stmt.span, self.ctx.cls.is_synthetic
        )
        if isinstance(result, Diagnostic):
            self.diagnostics.append(result)

    # Expressions

    def concatenable(self, t: TypeRef) -> bool:
        return isinstance(t, (PrimitiveType, NullType)) and t != VOID

    def expression(self, expr: Expr) -> Optional[TypeRef]:
        match expr:
            case IntLit():
                return self.record(expr, INT)
            case BoolLit():
                return self.record(expr, BOOLEAN)
            case StrLit():
                return self.record(expr, STRING)
            case NullLit():
                return self.record(expr, NULL)
            case This():
                return self.record(expr, self.this_type(expr.span))
            case QualifiedThis():
                self.error("E026", f"'{expr.qualifier}.this' can only be used as the receiver of a call", expr.span)
                return None
            case Name():
                return self.record(expr, self.name(expr))
            case FieldAccess():
                return self.record(expr, self.field_access(expr))
            case Call():
                return self.record(expr, self.call(expr))
            case SuperCall():
                return self.record(expr, self.super_call(expr))
            case New():
                return self.record(expr, self.new(expr))
            case NewCollection():
                return self.record(expr, self.table.resolve_type(_collection_type_expr(expr), self.diagnostics))
            case Unary():
                return self.record(expr, self.unary(expr))
            case Binary():
                return self.record(expr, self.binary(expr))
        raise TypeError(f"Not sure how to attribute expression {type(expr).__name__}")

    def this_type(self, span: Span) -> Optional[TypeRef]:
        if self.ctx.is_static:
            self.error("E033", "'this' is not available in a static method", span)
            return None
        if self.ctx.is_group:
            return CollectionType(self.ctx.cls.type)
        return self.ctx.cls.type

    def name(self, expr: Name) -> Optional[TypeRef]:
        local = self.ctx.lookup(expr.name)
        if local is not None:
            self.typed.names[id(expr)] = NameBinding.LOCAL
            return local
        if not self.ctx.is_static and not self.ctx.is_group:
            found = self.ctx.cls.lookup_field(expr.name)
            if found is not None:
                self.typed.names[id(expr)] = NameBinding.FIELD
                return _specialize(found[1], self.ctx.cls) if expr.name == "delegate" else found[1]
        notes = ()
        if expr.name in self.table:
            notes = (f"'{expr.name}' is a class; only static calls may use it as a receiver",)
        elif self.ctx.is_group and self.ctx.cls.lookup_field(expr.name) is not None:
            notes = ("inside a group method 'this' is the collection, so element fields are not in scope",)
        self.error("E031", f"unknown identifier '{expr.name}'", expr.span, notes)
        return None

    def field_access(self, expr: FieldAccess) -> Optional[TypeRef]:
        target = self.expression(expr.target)
        if target is None:
            return None
        if not isinstance(target, ClassType):
            self.error("E027", f"a value of type {target} has no field '{expr.name}'", expr.span)
            return None
        found = target.symbol.lookup_field(expr.name)
        if found is None:
            self.error("E027", f"class '{target.name}' has no field '{expr.name}'", expr.span)
            return None
        owner, type_ref = found
        if owner.is_synthetic and expr.name == "delegate":
            return _specialize(type_ref, target.symbol)
        return type_ref

    def call(self, expr: Call) -> Optional[TypeRef]:
        receiver = expr.receiver
        if receiver is None:
            arg_types = [self.expression(a) for a in expr.args]
            return self.unqualified_call(expr, arg_types)
        if isinstance(receiver, QualifiedThis):
            arg_types = [self.expression(a) for a in expr.args]
            return self.escape_call(expr, receiver, arg_types)
        if isinstance(receiver, Name) and self.is_class_receiver(receiver):
            self.typed.names[id(receiver)] = NameBinding.CLASS
            arg_types = [self.expression(a) for a in expr.args]
            cls = self.table[receiver.name]
            target = cls.lookup_static(expr.name)
            if target is None:
                self.error("E020", f"no static method '{expr.name}' in class '{cls.name}'", expr.span)
                return None
            return self.settle(expr, _check_call(StaticCall(target), target, arg_types, expr.span))

        receiver_type = self.expression(receiver)
        arg_types = [self.expression(a) for a in expr.args]
        if receiver_type is None:
            return None
        result = resolve_call(receiver_type, expr.name, arg_types, span=expr.span, table=self.table, policy=self.policy)
        resolved = self.settle(expr, result)
        if isinstance(result, BuiltinCollectionCall):
            return COLLECTION_BUILTINS[expr.name].return_type(receiver_type.element)
        if isinstance(result, InstanceCall) and result.target.kind == MethodKind.SYNTHETIC_DELEGATION:
            return _specialize(resolved, receiver_type.symbol)
        return resolved

    def is_class_receiver(self, receiver: Name) -> bool:
        if self.ctx.lookup(receiver.name) is not None or receiver.name not in self.table:
            return False
        in_field_scope = not self.ctx.is_static and not self.ctx.is_group
        return not (in_field_scope and self.ctx.cls.lookup_field(receiver.name) is not None)

    def settle(self, expr: Union[Call, SuperCall], result: Union[Resolution, Diagnostic, None]) -> Optional[TypeRef]:
        if result is None:
            return None
        if isinstance(result, Diagnostic):
            self.diagnostics.append(result)
            return None
        self.typed.resolutions[id(expr)] = result
        if isinstance(result, BuiltinCollectionCall):
            return None
        if isinstance(result, DeferredGroupCall):
            return result.signature.return_type
        return result.target.return_type

    def unqualified_call(self, expr: Call, arg_types: list[TypeRef]) -> Optional[TypeRef]:
        cls = self.ctx.cls
        target = cls.lookup_static(expr.name)
        if target is not None:
            return self.settle(expr, _check_call(StaticCall(target), target, arg_types, expr.span))
        if not self.ctx.is_group:
            target = lookup_instance(cls, expr.name)
            if target is not None:
                if self.ctx.is_static:
                    message = f"cannot call instance method '{target.qualified_name}' from a static method"
                    self.error("E033", message, expr.span)
                    return None
                result = _check_call(InstanceCall(target), target, arg_types, expr.span)
                return self.settle(expr, result)
        self.error("E020", f"no method '{expr.name}' in scope", expr.span)
        return None

    def escape_call(self, expr: Call, receiver: QualifiedThis, arg_types: list[TypeRef]) -> Optional[TypeRef]:
        if not self.ctx.is_group:
            self.error("E024", f"'{receiver.qualifier}.this' is only allowed inside a group method", receiver.span)
            return None
        qualifier = self.table.get(receiver.qualifier)
        self.record(receiver, CollectionType(self.ctx.cls.type))
        result = resolve_group_escape(
            self.ctx.cls, qualifier, expr.name, arg_types, qualifier_name=receiver.qualifier, span=expr.span
        )
        resolved = self.settle(expr, result)
        if isinstance(result, BuiltinCollectionCall):
            return COLLECTION_BUILTINS[expr.name].return_type(self.ctx.cls.type)
        return resolved

    def super_call(self, expr: SuperCall) -> Optional[TypeRef]:
        arg_types = [self.expression(a) for a in expr.args]
        if self.ctx.is_static:
            self.error("E033", "'super' is not available in a static method", expr.span)
            return None
        parent = self.ctx.cls.superclass
        if self.ctx.is_group:
            found = lookup_group(parent, expr.name) if parent is not None else None
            target = found[0] if found is not None else None
            kind = "group method"
        else:
            target = lookup_instance(parent, expr.name) if parent is not None else None
            kind = "instance method"
        if target is None:
            self.error("E032", f"no {kind} '{expr.name}' above class '{self.ctx.cls.name}'", expr.span)
            return None
        return self.settle(expr, _check_call(SuperMethodCall(target), target, arg_types, expr.span))

    def new(self, expr: New) -> Optional[TypeRef]:
        arg_types = [self.expression(a) for a in expr.args]
        cls = self.table.get(expr.class_name)
        if cls is None:
            self.error("E016", f"unknown type '{expr.class_name}'", expr.span)
            return None
        params = cls.constructor.param_types if cls.constructor is not None else []
        result = _check_args(None, f"{cls.name} constructor", params, arg_types, expr.span, cls.is_synthetic)
        if isinstance(result, Diagnostic):
            self.diagnostics.append(result)
        return cls.type

    def unary(self, expr: Unary) -> Optional[TypeRef]:
        operand = self.expression(expr.operand)
        if operand is None:
            return None
        expected = BOOLEAN if expr.op == "!" else INT
        if operand != expected:
            self.error("E029", f"'{expr.op}' needs a {expected} operand, found {operand}", expr.span)
            return None
        return expected

    def binary(self, expr: Binary) -> Optional[TypeRef]:
        left = self.expression(expr.left)
        right = self.expression(expr.right)
        if left is None or right is None:
            return None
        op = expr.op
        if op == "+" and STRING in (left, right) and self.concatenable(left) and self.concatenable(right):
            return STRING
        if op in ("+", "-", "*", "/") and left == INT and right == INT:
            return INT
        if op in ("<", "<=", ">", ">=") and left == INT and right == INT:
            return BOOLEAN
        if op in ("&&", "||") and left == BOOLEAN and right == BOOLEAN:
            return BOOLEAN
        if op in ("==", "!="):
            if isinstance(left, PrimitiveType) or isinstance(right, PrimitiveType):
                if left == right and left != VOID:
                    return BOOLEAN
            elif assignable(left, right) or assignable(right, left):
                return BOOLEAN
        self.error("E029", f"operator '{op}' cannot be applied to {left} and {right}", expr.span)
        return None


def _collection_type_expr(expr: NewCollection) -> TypeExpr:
    return TypeExpr(COLLECTION_TYPE, expr.element, span=expr.span)


def attribute(program: Program, table: SymbolTable, policy: LookupPolicy = LookupPolicy.STATIC) -> AttributionResult:
    """Type every expression and classify every call of an entered program. All diagnostics are collected."""
    return _Attributor(program, table, policy).run()

