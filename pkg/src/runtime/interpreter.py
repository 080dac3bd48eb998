# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Tree-walking interpreter for attributed SwarmLang programs, original or desugared."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO, Union

from src.attribution import (
    BuiltinCollectionCall,
    DeferredGroupCall,
    GroupCall,
    GroupEscapeCall,
    InstanceCall,
    LookupPolicy,
    NameBinding,
    StaticCall,
    SuperMethodCall,
    TypedAst,
    least_upper_bound,
    lookup_group,
    lookup_instance,
)
from src.builtins import COLLECTION_BUILTINS
from src.callbacks import Callback, DispatchEvent
from src.diagnostics import SYNTHETIC_SPAN, Diagnostic, Span
from src.frontend.syntax import (
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    Expr,
    ExprStmt,
    FieldAccess,
    For,
    ForEach,
    If,
    IntLit,
    LocalDecl,
    Name,
    New,
    NewCollection,
    NullLit,
    Print,
    QualifiedThis,
    Return,
    Stmt,
    StrLit,
    SuperCall,
    SuperConstructorCall,
    This,
    Unary,
    While,
)
from src.runtime.values import (
    NULL_V,
    BoolV,
    CollectionV,
    IntV,
    NullV,
    ObjectV,
    StrV,
    SwarmRuntimeError,
    Value,
    default_value,
    stringify,
    values_equal,
    wrap_int,
)
from src.symbols import VOID, ClassSymbol, CollectionType, MethodKind, MethodSymbol, SymbolTable

__all__ = [
    "RunConfig",
    "RunResult",
    "Frame",
    "DispatchTarget",
    "Interpreter",
    "select_entry",
    "run",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    policy: LookupPolicy = LookupPolicy.STATIC
    entry_class: Optional[str] = None
    entry_method: str = "main"

    @classmethod
    def from_entry(cls, entry: Optional[str], policy: Union[LookupPolicy, str] = LookupPolicy.STATIC) -> "RunConfig":
        """Build from a "Class.method" string, or None for the default entry."""
        if entry is None:
            return cls(LookupPolicy(policy))
        class_name, dot, method = entry.partition(".")
        if not dot or not class_name or not method or "." in method:
            raise ValueError(f"Not sure how to run entry '{entry}', expected the form Class.method")
        return cls(LookupPolicy(policy), class_name, method)


@dataclass
class RunResult:
    stdout: str
    status: int
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == EXIT_OK


@dataclass
class Frame:
    this: Optional[Value]
    method: MethodSymbol
    group_context: Optional[ClassSymbol] = None
    scopes: list[dict[str, Value]] = field(default_factory=lambda: [{}])

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, value: Value) -> None:
        self.scopes[-1][name] = value

    def lookup(self, name: str) -> Value:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise SwarmRuntimeError(f"unbound local '{name}'")

    def assign(self, name: str, value: Value) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        raise SwarmRuntimeError(f"unbound local '{name}'")


@dataclass(frozen=True)
class DispatchTarget:
    """Outcome of Swarm-Lookup: an instance method, a group method with its defining class, or a builtin."""

    selector: str
    method: Optional[MethodSymbol] = None
    defining: Optional[ClassSymbol] = None
    start: Optional[ClassSymbol] = None

    @property
    def is_builtin(self) -> bool:
        return self.method is None

    @property
    def is_group(self) -> bool:
        return self.method is not None and self.method.kind == MethodKind.GROUP


class _Return(Exception):
    def __init__(self, value: Optional[Value]):
        self.value = value


def _is_entry(method: Optional[MethodSymbol]) -> bool:
    return method is not None and method.kind == MethodKind.STATIC and not method.params and method.return_type == VOID


def select_entry(table: SymbolTable, cfg: RunConfig) -> Union[MethodSymbol, Diagnostic]:
    """The method a run starts in: the configured one, else `Main.main`, else the unique static void `main()`."""
    if cfg.entry_class is not None:
        cls = table.get(cfg.entry_class)
        method = cls.static_methods.get(cfg.entry_method) if cls is not None else None
        if _is_entry(method):
            return method
        message = f"'{cfg.entry_class}.{cfg.entry_method}' is not a static, zero-parameter, void method"
        return Diagnostic("E018", message, SYNTHETIC_SPAN)
    main = table.get("Main")
    if main is not None and _is_entry(main.static_methods.get(cfg.entry_method)):
        return main.static_methods[cfg.entry_method]
    candidates = [
        c.static_methods[cfg.entry_method]
        for c in table.user_classes()
        if _is_entry(c.static_methods.get(cfg.entry_method))
    ]
    if len(candidates) == 1:
        return candidates[0]
    if not candidates:
        return Diagnostic("E018", f"no class declares a static void {cfg.entry_method}()", SYNTHETIC_SPAN)
    owners = ", ".join(m.owner.name for m in candidates)
    return Diagnostic(
        "E018", f"several classes declare a static void {cfg.entry_method}(): {owners}; pick one with --entry",
        SYNTHETIC_SPAN,
    )


class Interpreter:
    """Runs one attributed program. Single-threaded; one program execution per instance."""

    def __init__(
        self,
        typed: TypedAst,
        policy: LookupPolicy = LookupPolicy.STATIC,
        callbacks: Sequence[Callback] = (),
        stream: Optional[TextIO] = None,
    ):
        self.typed = typed
        self.table = typed.table
        self.policy = LookupPolicy(policy)
        self.callbacks = list(callbacks)
        self.stream = stream
        self.output: list[str] = []

    # Entry

    def run(self, entry: MethodSymbol) -> RunResult:
        for cb in self.callbacks:
            cb.on_run_start(entry.qualified_name)
        log.debug(f"Running {entry.qualified_name} under the {self.policy} lookup policy")
        status, error = EXIT_OK, None
        try:
            self.invoke(entry, None, [])
        except SwarmRuntimeError as e:
            status, error = EXIT_RUNTIME_ERROR, e.message
        except RecursionError:
            status, error = EXIT_RUNTIME_ERROR, "stack overflow"
        for cb in self.callbacks:
            cb.on_run_end(status)
        return RunResult("".join(line + "\n" for line in self.output), status, error)

    def write(self, line: str) -> None:
        self.output.append(line)
        if self.stream is not None:
            self.stream.write(line + "\n")
        for cb in self.callbacks:
            cb.on_print(line)

    # Swarm-Lookup

    def swarm_lookup(
        self,
        receiver: Value,
        selector: str,
        policy: Optional[LookupPolicy] = None,
    ) -> DispatchTarget:
        """Find what `receiver.selector(...)` runs.

        Objects use the ordinary instance walk. Collections answer builtin selectors themselves; otherwise the group
        walk starts at the declared element class of the collection (static policy) or at the least upper bound of the
        classes of the actual elements (dynamic policy). A group method called on `this` sees the collection as it came
        in, so its declared element may lie below the class that declares the method.
        """
        policy = self.policy if policy is None else LookupPolicy(policy)
        if isinstance(receiver, ObjectV):
            method = lookup_instance(receiver.cls, selector)
            if method is None:
                raise SwarmRuntimeError(f"message not understood: {selector}")
            return DispatchTarget(selector, method, method.owner, receiver.cls)
        if isinstance(receiver, NullV):
            raise SwarmRuntimeError(f"null receiver for '{selector}'")
        if not isinstance(receiver, CollectionV):
            raise SwarmRuntimeError(f"message not understood: {selector}")

        if selector in COLLECTION_BUILTINS:
            return DispatchTarget(selector)
        if policy == LookupPolicy.STATIC:
            start = receiver.declared_element
        else:
            start = self.element_bound(receiver)
        found = lookup_group(start, selector)
        if found is None:
            raise SwarmRuntimeError(f"message not understood: {selector}")
        method, defining = found
        return DispatchTarget(selector, method, defining, start)

    @staticmethod
    def element_bound(receiver: CollectionV) -> ClassSymbol:
        if not receiver.elements:
            raise SwarmRuntimeError("group lookup on empty collection")
        classes = []
        for element in receiver.elements:
            if not isinstance(element, ObjectV):
                raise SwarmRuntimeError("null element in group receiver")
            classes.append(element.cls)
        return least_upper_bound(classes)

    def dispatched(self, target: DispatchTarget, policy: LookupPolicy, span: Span) -> None:
        event = DispatchEvent(target.selector, target.start.name, target.defining.name, str(policy), span)
        for cb in self.callbacks:
            cb.on_group_dispatch(event)

    # Invocation

    def invoke(self, method: MethodSymbol, this: Optional[Value], args: list[Value]) -> Optional[Value]:
        if method.kind == MethodKind.GROUP:
            return self.invoke_group(method, method.owner, this, args)
        return self.execute(Frame(this, method), method, args)

    def invoke_group(
        self, method: MethodSymbol, defining: ClassSymbol, receiver: CollectionV, args: list[Value]
    ) -> Optional[Value]:
        """Run a group method with `this` bound to the receiver collection."""
        if method.kind != MethodKind.GROUP:
            raise ValueError(f"Not sure how to invoke {method.qualified_name} as a group method, it is {method.kind}")
        return self.execute(Frame(receiver, method, group_context=defining), method, args)

    def execute(self, frame: Frame, method: MethodSymbol, args: list[Value]) -> Optional[Value]:
        for (name, _), value in zip(method.params, args):
            frame.declare(name, value)
        try:
            self.block(method.body, frame, new_scope=False)
        except _Return as r:
            return r.value
        return None if method.return_type == VOID else default_value(method.return_type)

    def builtin_collection(self, receiver: CollectionV, selector: str, args: list[Value]) -> Value:
        match selector:
            case "add":
                receiver.elements.append(args[0])
                return BoolV(True)
            case "size":
                return IntV(len(receiver.elements))
            case "isEmpty":
                return BoolV(not receiver.elements)
            case "get":
                index, n = args[0].value, len(receiver.elements)
                if not 0 <= index < n:
                    raise SwarmRuntimeError(f"index out of bounds: {index} of {n}")
                return receiver.elements[index]
        raise SwarmRuntimeError(f"message not understood: {selector}")

    def construct(self, cls: ClassSymbol, args: list[Value]) -> ObjectV:
        obj = ObjectV(cls, {name: default_value(t) for name, t in cls.all_fields().items()})
        self.run_constructor(cls, obj, args)
        return obj

    def run_constructor(self, cls: ClassSymbol, obj: ObjectV, args: list[Value]) -> None:
        if cls.is_object:
            return
        ctor = cls.constructor
        if ctor is None:
            self.run_constructor(cls.superclass, obj, [])
            return
        frame = Frame(obj, ctor)
        for (name, _), value in zip(ctor.params, args):
            frame.declare(name, value)
        statements = ctor.body.statements
        if statements and isinstance(statements[0], SuperConstructorCall):
            parent_args = [self.eval(a, frame) for a in statements[0].args]
            self.run_constructor(cls.superclass, obj, parent_args)
            statements = statements[1:]
        else:
            self.run_constructor(cls.superclass, obj, [])
        try:
            for s in statements:
                self.stmt(s, frame)
        except _Return:
            pass

    # Statements

    def block(self, block: Block, frame: Frame, new_scope: bool = True) -> None:
        if new_scope:
            frame.push()
        try:
            for s in block.statements:
                self.stmt(s, frame)
        finally:
            if new_scope:
                frame.pop()

    def stmt(self, s: Stmt, frame: Frame) -> None:
        match s:
            case Block():
                self.block(s, frame)
            case LocalDecl():
                if s.init is not None:
                    value = self.eval(s.init, frame)
                else:
                    value = default_value(self.table.resolve_type(s.type, []))
                frame.declare(s.name, value)
            case Assign():
                self.assign(s, frame)
            case ExprStmt():
                self.eval(s.expr, frame)
            case If():
                if self.truth(s.condition, frame):
                    self.block(s.then, frame)
                elif s.otherwise is not None:
                    self.block(s.otherwise, frame)
            case While():
                while self.truth(s.condition, frame):
                    self.block(s.body, frame)
            case For():
                frame.push()
                try:
                    if s.init is not None:
                        self.stmt(s.init, frame)
                    while s.condition is None or self.truth(s.condition, frame):
                        self.block(s.body, frame)
                        if s.update is not None:
                            self.stmt(s.update, frame)
                finally:
                    frame.pop()
            case ForEach():
                iterable = self.eval(s.iterable, frame)
                if not isinstance(iterable, CollectionV):
                    raise SwarmRuntimeError("null collection in for-each")
                for element in list(iterable.elements):
                    frame.push()
                    try:
                        frame.declare(s.name, element)
                        self.block(s.body, frame)
                    finally:
                        frame.pop()
            case Return():
                raise _Return(None if s.value is None else self.eval(s.value, frame))
            case Print():
                self.write(stringify(self.eval(s.value, frame)))
            case SuperConstructorCall():
                raise SwarmRuntimeError("super(...) outside the start of a constructor")
            case _:
                raise TypeError(f"Not sure how to execute {type(s).__name__}")

    def truth(self, condition: Expr, frame: Frame) -> bool:
        return self.eval(condition, frame).value

    def assign(self, s: Assign, frame: Frame) -> None:
        target = s.target
        if isinstance(target, FieldAccess):
            obj = self.eval(target.target, frame)
            if not isinstance(obj, ObjectV):
                raise SwarmRuntimeError(f"null dereference writing field '{target.name}'")
            current = obj.fields[target.name] if s.op != "=" else None
            obj.fields[target.name] = self.compound(s, current, frame)
            return
        if not isinstance(target, Name):
            raise SwarmRuntimeError("cannot assign to this expression")
        if self.typed.binding_of(target) == NameBinding.FIELD:
            fields = frame.this.fields
            current = fields[target.name] if s.op != "=" else None
            fields[target.name] = self.compound(s, current, frame)
        else:
            current = frame.lookup(target.name) if s.op != "=" else None
            frame.assign(target.name, self.compound(s, current, frame))

    def compound(self, s: Assign, current: Optional[Value], frame: Frame) -> Value:
        value = self.eval(s.value, frame)
        if s.op == "=":
            return value
        return self.arithmetic(s.op[0], current, value)

    # Expressions

    def eval(self, e: Expr, frame: Frame) -> Value:
        match e:
            case IntLit():
                return IntV(e.value)
            case BoolLit():
                return BoolV(e.value)
            case StrLit():
                return StrV(e.value)
            case NullLit():
                return NULL_V
            case This():
                if frame.group_context is not None:
                    return frame.this.view(frame.method.owner)
                return frame.this
            case QualifiedThis():
                return frame.this
            case Name():
                return self.name(e, frame)
            case FieldAccess():
                obj = self.eval(e.target, frame)
                if not isinstance(obj, ObjectV):
                    raise SwarmRuntimeError(f"null dereference reading field '{e.name}'")
                return obj.fields[e.name]
            case Call():
                return self.call(e, frame)
            case SuperCall():
                return self.super_call(e, frame)
            case New():
                cls = self.table[e.class_name]
                return self.construct(cls, [self.eval(a, frame) for a in e.args])
            case NewCollection():
                collection_type = self.typed.type_of(e)
                if not isinstance(collection_type, CollectionType):
                    raise SwarmRuntimeError(f"unknown collection type at {e.span}")
                return CollectionV(collection_type.element.symbol)
            case Unary():
                operand = self.eval(e.operand, frame)
                if e.op == "!":
                    return BoolV(not operand.value)
                return IntV(wrap_int(-operand.value))
            case Binary():
                return self.binary(e, frame)
        raise TypeError(f"Not sure how to evaluate {type(e).__name__}")

    def name(self, e: Name, frame: Frame) -> Value:
        binding = self.typed.binding_of(e)
        if binding == NameBinding.FIELD:
            return frame.this.fields[e.name]
        if binding == NameBinding.CLASS:
            raise SwarmRuntimeError(f"class '{e.name}' used as a value")
        return frame.lookup(e.name)

    def receiver(self, e: Expr, frame: Frame) -> Value:
        # a call on plain `this` keeps the receiver collection as it came in
        if isinstance(e, (This, QualifiedThis)):
            return frame.this
        return self.eval(e, frame)

    def call(self, e: Call, frame: Frame) -> Optional[Value]:
        res = self.typed.resolution_of(e)
        if isinstance(res, StaticCall):
            return self.invoke(res.target, None, [self.eval(a, frame) for a in e.args])

        if e.receiver is None:
            receiver = frame.this
        else:
            receiver = self.receiver(e.receiver, frame)
        args = [self.eval(a, frame) for a in e.args]

        match res:
            case InstanceCall():
                target = self.swarm_lookup(receiver, e.name)
                return self.invoke(target.method, receiver, args)
            case BuiltinCollectionCall():
                if not isinstance(receiver, CollectionV):
                    raise SwarmRuntimeError(f"null receiver for '{e.name}'")
                return self.builtin_collection(receiver, e.name, args)
            case GroupCall() | DeferredGroupCall():
                if not isinstance(receiver, CollectionV):
                    raise SwarmRuntimeError(f"null receiver for '{e.name}'")
                target = self.swarm_lookup(receiver, e.name)
                if target.is_builtin:
                    return self.builtin_collection(receiver, e.name, args)
                self.dispatched(target, self.policy, e.span)
                return self.invoke_group(target.method, target.defining, receiver, args)
            case GroupEscapeCall():
                target = DispatchTarget(e.name, res.target, res.defining, res.element)
                self.dispatched(target, LookupPolicy.STATIC, e.span)
                return self.invoke_group(res.target, res.defining, receiver, args)
        raise SwarmRuntimeError(f"unresolved call to '{e.name}' at {e.span}")

    def super_call(self, e: SuperCall, frame: Frame) -> Optional[Value]:
        res = self.typed.resolution_of(e)
        if not isinstance(res, SuperMethodCall):
            raise SwarmRuntimeError(f"unresolved super call to '{e.name}' at {e.span}")
        args = [self.eval(a, frame) for a in e.args]
        method = res.target
        if method.kind == MethodKind.GROUP:
            parent = frame.group_context.superclass
            self.dispatched(DispatchTarget(e.name, method, method.owner, parent), LookupPolicy.STATIC, e.span)
            return self.invoke_group(method, method.owner, frame.this, args)
        return self.execute(Frame(frame.this, method), method, args)

    def binary(self, e: Binary, frame: Frame) -> Value:
        op = e.op
        if op == "&&":
            return BoolV(self.truth(e.left, frame) and self.truth(e.right, frame))
        if op == "||":
            return BoolV(self.truth(e.left, frame) or self.truth(e.right, frame))
        left = self.eval(e.left, frame)
        right = self.eval(e.right, frame)
        if op == "==":
            return BoolV(values_equal(left, right))
        if op == "!=":
            return BoolV(not values_equal(left, right))
        if op == "+" and (isinstance(left, StrV) or isinstance(right, StrV)):
            return StrV(stringify(left) + stringify(right))
        if op in ("<", "<=", ">", ">="):
            a, b = left.value, right.value
            return BoolV({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op])
        return self.arithmetic(op, left, right)

    @staticmethod
    def arithmetic(op: str, left: Value, right: Value) -> Value:
        if op == "+" and (isinstance(left, StrV) or isinstance(right, StrV)):
            return StrV(stringify(left) + stringify(right))
        a, b = left.value, right.value
        match op:
            case "+":
                return IntV(wrap_int(a + b))
            case "-":
                return IntV(wrap_int(a - b))
            case "*":
                return IntV(wrap_int(a * b))
            case "/":
                if b == 0:
                    raise SwarmRuntimeError("division by zero")
                quotient = abs(a) // abs(b)
                return IntV(wrap_int(quotient if (a < 0) == (b < 0) else -quotient))
        raise SwarmRuntimeError(f"unknown operator '{op}'")


def run(
    typed: TypedAst,
    cfg: RunConfig = RunConfig(),
    callbacks: Sequence[Callback] = (),
    stream: Optional[TextIO] = None,
) -> Union[RunResult, Diagnostic]:
    """Select the entry method and execute it; an unusable entry comes back as an E018 diagnostic."""
    entry = select_entry(typed.table, cfg)
    if isinstance(entry, Diagnostic):
        return entry
    return Interpreter(typed, cfg.policy, callbacks, stream).run(entry)
