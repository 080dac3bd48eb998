# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Lower group constructs to core code through synthetic wrapper classes.

For every class C with group methods G(C) a wrapper `C$Group` is generated. It holds the wrapped collection in a
`delegate` field, receives the moved group methods and, at the root of each wrapper chain, forwards the builtin
collection interface to the delegate. Wrapper inheritance parallels element inheritance, and every group call site
`recv.m(args)` becomes `new W(recv).m(args)`.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, TypeVar

from src.attribution import (
    BuiltinCollectionCall,
    DeferredGroupCall,
    GroupCall,
    GroupEscapeCall,
    LookupPolicy,
    StaticCall,
    TypedAst,
    attribute,
    lookup_group,
)
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
    FieldDecl,
    For,
    ForEach,
    If,
    IntLit,
    LocalDecl,
    MethodDecl,
    Name,
    New,
    NewCollection,
    Node,
    NullLit,
    Param,
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
    VOID,
    ClassSymbol,
    CollectionType,
    MethodKind,
    MethodSymbol,
    SymbolTable,
    enter,
    escape_copy_name,
    superclass_chain,
    wrapper_name,
)

__all__ = [
    "DELEGATE_FIELD",
    "WrapperPlan",
    "CoreProgram",
    "DesugarResult",
    "plan_wrappers",
    "synthesize_wrapper",
    "strip_group_methods",
    "rewrite_call_sites",
    "desugar",
]

log = logging.getLogger(__name__)

DELEGATE_FIELD = "delegate"

N = TypeVar("N", bound=Node)


@dataclass(eq=False)
class WrapperPlan:
    element_class: ClassSymbol
    wrapper_name: str
    super_wrapper: Optional["WrapperPlan"]
    moved_methods: list[MethodSymbol]
    delegation_selectors: list[str]
    # selectors of moved methods that qualified-this calls reach without virtual dispatch
    escape_copies: list[str] = field(default_factory=list)

    @property
    def is_root(self) -> bool:
        return self.super_wrapper is None

    @property
    def constructor_param_type(self) -> CollectionType:
        return CollectionType(self.element_class.type)

    def __repr__(self) -> str:
        return f"WrapperPlan({self.wrapper_name})"


@dataclass
class CoreProgram:
    """A desugared program, entered and attributed with group features disabled."""

    program: Program
    typed: TypedAst
    plans: list[WrapperPlan] = field(default_factory=list)


@dataclass
class DesugarResult:
    core: Optional[CoreProgram]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.core is not None and not self.diagnostics


def plan_wrappers(table: SymbolTable) -> list[WrapperPlan]:
    """One plan per class with group methods, ancestors before descendants."""
    plans: dict[str, WrapperPlan] = {}
    planned = [c for c in table.user_classes() if c.group_methods]
    for cls in sorted(planned, key=lambda c: len(superclass_chain(c))):
        super_wrapper = None
        # scan upwards until a wrapper is found or the top is reached
        for ancestor in superclass_chain(cls)[1:]:
            if ancestor.name in plans:
                super_wrapper = plans[ancestor.name]
                break
        moved = list(cls.group_methods.values())
        moved_selectors = {m.selector for m in moved}
        for method in moved:
            if method.selector in COLLECTION_BUILTINS:
                span = method.decl.span if method.decl is not None else SYNTHETIC_SPAN
                log.warning_once(
                    f"{span}: group method '{method.qualified_name}' replaces the builtin '{method.selector}' in "
                    f"{wrapper_name(cls.name)}; plain calls still reach the builtin, only "
                    f"'{cls.name}.this.{method.selector}()' reaches the group method"
                )
        delegation = [s for s in COLLECTION_BUILTINS if s not in moved_selectors]
        plans[cls.name] = WrapperPlan(cls, wrapper_name(cls.name), super_wrapper, moved, delegation)
        parent = super_wrapper.wrapper_name if super_wrapper is not None else "Object"
        log.debug(f"Planned {wrapper_name(cls.name)} extends {parent}")
    return list(plans.values())


def _type_expr(cls_name: str, span: Span) -> TypeExpr:
    return TypeExpr(cls_name, span=span)


def _collection_of(cls_name: str, span: Span) -> TypeExpr:
    return TypeExpr(COLLECTION_TYPE, _type_expr(cls_name, span), span=span)


def _delegate(span: Span) -> FieldAccess:
    return FieldAccess(This(span=span), DELEGATE_FIELD, span=span)


def synthesize_wrapper(plan: WrapperPlan, moved: Optional[list[MethodDecl]] = None) -> ClassDecl:
    """The wrapper class for `plan`.

    `moved` are the already rewritten group method declarations; by default the original declarations are moved
    unchanged, with their group flag dropped. Every selector in `plan.escape_copies` also gets a renamed copy.
    """
    element = plan.element_class
    span = element.decl.span if element.decl is not None else SYNTHETIC_SPAN
    if moved is None:
        moved = [replace(m.decl, is_group=False) for m in plan.moved_methods]
    copies = [
        replace(m, name=escape_copy_name(m.name, element.name)) for s in plan.escape_copies for m in moved if m.name == s
    ]

    param = Param(_collection_of(element.name, span), DELEGATE_FIELD, span=span)
    if plan.is_root:
        fields = [FieldDecl(_collection_of(element.name, span), DELEGATE_FIELD, span=span)]
        ctor_body = Block([Assign(_delegate(span), "=", Name(DELEGATE_FIELD, span=span), span=span)], span=span)
    else:
        fields = []
        ctor_body = Block([SuperConstructorCall([Name(DELEGATE_FIELD, span=span)], span=span)], span=span)
    constructor = ConstructorDecl(plan.wrapper_name, [param], ctor_body, span=span)

    delegations = []
    if plan.is_root:
        for selector in plan.delegation_selectors:
            builtin = COLLECTION_BUILTINS[selector]
            params = [Param(_slot_type(slot, element.name, span), name, span=span) for name, slot in builtin.params]
            forwarded = Call(_delegate(span), selector, [Name(p.name, span=span) for p in params], span=span)
            delegations.append(
                MethodDecl(
                    selector,
                    params,
                    _slot_type(builtin.returns, element.name, span),
                    Block([Return(forwarded, span=span)], span=span),
                    span=span,
                )
            )

    return ClassDecl(
        plan.wrapper_name,
        plan.super_wrapper.wrapper_name if plan.super_wrapper is not None else None,
        fields,
        [constructor],
        list(moved) + copies + delegations,
        span=span,
    )


def _slot_type(slot, element_name: str, span: Span) -> TypeExpr:
    if isinstance(slot, str):
        return _type_expr(element_name, span)
    return TypeExpr(slot.name, span=span)


def strip_group_methods(table: SymbolTable, plans: list[WrapperPlan]) -> None:
    """Move G(C) out of every planned class C into a wrapper symbol registered in `table`.

    Afterwards M*(C) = M(C) minus G(C), and the wrapper holds G(C), the escape copies and, at the root of a chain, the
    delegation methods.
    """
    for plan in plans:
        element = table[plan.element_class.name]
        parent = table[plan.super_wrapper.wrapper_name] if plan.super_wrapper is not None else table.object
        wrapper = ClassSymbol(plan.wrapper_name, superclass=parent, is_synthetic=True, wrapped_element=element)
        if plan.is_root:
            wrapper.fields[DELEGATE_FIELD] = CollectionType(element.type)
        ctor_params = [(DELEGATE_FIELD, CollectionType(element.type))]
        wrapper.constructor = MethodSymbol(plan.wrapper_name, MethodKind.CONSTRUCTOR, ctor_params, VOID, None, wrapper)
        for method in element.group_methods.values():
            wrapper.instance_methods[method.selector] = replace(method, kind=MethodKind.INSTANCE, owner=wrapper)
        for selector in plan.escape_copies:
            copy = escape_copy_name(selector, element.name)
            method = element.group_methods[selector]
            wrapper.instance_methods[copy] = replace(method, selector=copy, kind=MethodKind.INSTANCE, owner=wrapper)
        if plan.is_root:
            for selector in plan.delegation_selectors:
                builtin = COLLECTION_BUILTINS[selector]
                wrapper.instance_methods[selector] = MethodSymbol(
                    selector,
                    MethodKind.SYNTHETIC_DELEGATION,
                    list(zip((n for n, _ in builtin.params), builtin.param_types(element.type))),
                    builtin.return_type(element.type),
                    None,
                    wrapper,
                )
        element.group_methods = {}
        element.wrapper = wrapper
        table.classes[wrapper.name] = wrapper


class _CallSiteRewriter:
    """Rebuilds method bodies with every group construct replaced by its core equivalent."""

    def __init__(self, typed: TypedAst, plans: list[WrapperPlan]):
        self.typed = typed
        self.table = typed.table
        self.plans = {p.element_class.name: p for p in plans}
        self.diagnostics: list[Diagnostic] = []
        self.ctx: Optional[ClassSymbol] = None
        self.in_group = False
        self.rewritten = 0

    def at(self, new: N, old: Node) -> N:
        new.span = old.span
        return new

    def nearest_plan(self, cls: ClassSymbol) -> Optional[WrapperPlan]:
        for current in superclass_chain(cls):
            if current.name in self.plans:
                return self.plans[current.name]
        return None

    def error(self, message: str, span: Span) -> None:
        self.diagnostics.append(Diagnostic("E099", f"internal desugar error: {message}", span))

    # Declarations

    def rewrite_class(self, decl: ClassDecl) -> tuple[ClassDecl, list[MethodDecl]]:
        """The stripped class and its rewritten group methods."""
        self.ctx = self.table[decl.name]
        constructors = [self.rewrite_callable(c, group=False) for c in decl.constructors]
        kept, moved = [], []
        for m in decl.methods:
            if m.is_group:
                moved.append(replace(self.rewrite_callable(m, group=True), is_group=False))
            else:
                kept.append(self.rewrite_callable(m, group=False))
        stripped = self.at(ClassDecl(decl.name, decl.superclass, list(decl.fields), constructors, kept), decl)
        self.ctx = None
        return stripped, moved

    def rewrite_callable(self, decl, group: bool):
        self.in_group = group
        body = self.block(decl.body)
        self.in_group = False
        return self.at(replace(decl, body=body), decl)

    # Statements

    def block(self, block: Block) -> Block:
        return self.at(Block([self.stmt(s) for s in block.statements]), block)

    def opt_block(self, block: Optional[Block]) -> Optional[Block]:
        return None if block is None else self.block(block)

    def opt_stmt(self, stmt: Optional[Stmt]) -> Optional[Stmt]:
        return None if stmt is None else self.stmt(stmt)

    def opt_expr(self, expr: Optional[Expr]) -> Optional[Expr]:
        return None if expr is None else self.expr(expr)

    def stmt(self, stmt: Stmt) -> Stmt:
        match stmt:
            case Block():
                return self.block(stmt)
            case LocalDecl():
                return self.at(LocalDecl(stmt.type, stmt.name, self.opt_expr(stmt.init)), stmt)
            case Assign():
                return self.at(Assign(self.expr(stmt.target), stmt.op, self.expr(stmt.value)), stmt)
            case ExprStmt():
                return self.at(ExprStmt(self.expr(stmt.expr)), stmt)
            case SuperConstructorCall():
                return self.at(SuperConstructorCall([self.expr(a) for a in stmt.args]), stmt)
            case If():
                rewritten = If(self.expr(stmt.condition), self.block(stmt.then), self.opt_block(stmt.otherwise))
                return self.at(rewritten, stmt)
            case While():
                return self.at(While(self.expr(stmt.condition), self.block(stmt.body)), stmt)
            case For():
                init, update = self.opt_stmt(stmt.init), self.opt_stmt(stmt.update)
                rewritten = For(init, self.opt_expr(stmt.condition), update, self.block(stmt.body))
                return self.at(rewritten, stmt)
            case ForEach():
                return self.at(ForEach(stmt.type, stmt.name, self.expr(stmt.iterable), self.block(stmt.body)), stmt)
            case Return():
                return self.at(Return(self.opt_expr(stmt.value)), stmt)
            case Print():
                return self.at(Print(self.expr(stmt.value)), stmt)
        raise TypeError(f"Not sure how to desugar statement {type(stmt).__name__}")

    # Expressions

    def expr(self, expr: Expr) -> Expr:
        match expr:
            case IntLit() | BoolLit() | StrLit() | NullLit() | Name() | NewCollection():
                return self.at(replace(expr), expr)
            case This():
                if self.in_group:
                    # bare `this` in a group method is the collection itself
                    return _delegate(expr.span)
                return self.at(This(), expr)
            case QualifiedThis():
                self.error(f"'{expr.qualifier}.this' outside a call", expr.span)
                return self.at(This(), expr)
            case FieldAccess():
                return self.at(FieldAccess(self.expr(expr.target), expr.name), expr)
            case Call():
                return self.call(expr)
            case SuperCall():
                return self.at(SuperCall(expr.name, [self.expr(a) for a in expr.args]), expr)
            case New():
                return self.at(New(expr.class_name, [self.expr(a) for a in expr.args]), expr)
            case Unary():
                return self.at(Unary(expr.op, self.expr(expr.operand)), expr)
            case Binary():
                return self.at(Binary(expr.op, self.expr(expr.left), self.expr(expr.right)), expr)
        raise TypeError(f"Not sure how to desugar expression {type(expr).__name__}")

    def call(self, expr: Call) -> Expr:
        res = self.typed.resolution_of(expr)
        args = [self.expr(a) for a in expr.args]
        receiver = expr.receiver

        if isinstance(res, DeferredGroupCall):
            self.error(f"call '{expr.name}' is only resolvable at run time", expr.span)
            return self.at(Call(self.opt_expr(receiver), expr.name, args), expr)

        if isinstance(receiver, QualifiedThis):
            return self.escape(expr, receiver, res, args)

        if self.in_group and isinstance(receiver, This):
            if isinstance(res, BuiltinCollectionCall) and self.builtin_shadowed(self.ctx, expr.name):
                return self.at(Call(_delegate(receiver.span), expr.name, args), expr)
            # group calls on `this` dispatch virtually through the running wrapper
            return self.at(Call(self.at(This(), receiver), expr.name, args), expr)

        if isinstance(res, GroupCall):
            plan = self.nearest_plan(res.element)
            if plan is None:
                self.error(f"no wrapper for element class '{res.element.name}'", expr.span)
                return self.at(Call(self.expr(receiver), expr.name, args), expr)
            wrapped = New(plan.wrapper_name, [self.expr(receiver)], span=receiver.span)
            self.rewritten += 1
            log.debug(f"{expr.span}: {expr.name} on Collection<{res.element.name}> wrapped in {plan.wrapper_name}")
            return self.at(Call(wrapped, expr.name, args), expr)

        if receiver is None and isinstance(res, StaticCall) and self.in_group:
            # the moved body no longer lives in the class declaring the static method
            owner = Name(res.target.owner.name, span=expr.span)
            return self.at(Call(owner, expr.name, args), expr)

        return self.at(Call(self.opt_expr(receiver), expr.name, args), expr)

    def builtin_shadowed(self, ctx: ClassSymbol, selector: str) -> bool:
        """Could a wrapper running a group method of `ctx` answer `selector` with a moved group method?"""
        related = superclass_chain(ctx) + self.table.subclasses(ctx)
        return any(selector in c.group_methods for c in related)

    def escape(self, expr: Call, receiver: QualifiedThis, res, args: list[Expr]) -> Expr:
        if isinstance(res, BuiltinCollectionCall):
            return self.at(Call(_delegate(receiver.span), expr.name, args), expr)
        if not isinstance(res, GroupEscapeCall):
            self.error(f"unresolved escape '{receiver.qualifier}.this.{expr.name}'", expr.span)
            return self.at(Call(_delegate(receiver.span), expr.name, args), expr)

        ctx, qualifier, target = self.ctx, res.element, res.target
        parent = ctx.superclass
        if qualifier is not ctx and parent is not None:
            above = lookup_group(parent, expr.name)
            if above is not None and above[0] is target:
                return self.at(SuperCall(expr.name, args), expr)
        if qualifier is ctx and all(
            (found := lookup_group(x, expr.name)) is not None and found[0] is target for x in self.table.subclasses(ctx)
        ):
            return self.at(Call(self.at(This(), receiver), expr.name, args), expr)

        # `this` must stay the running wrapper, so call a copy no subclass wrapper overrides
        plan = self.plans[res.defining.name]
        if expr.name not in plan.escape_copies:
            plan.escape_copies.append(expr.name)
        copy = escape_copy_name(expr.name, res.defining.name)
        log.debug(f"{expr.span}: {receiver.qualifier}.this.{expr.name} calls {plan.wrapper_name}.{copy}")
        return self.at(Call(self.at(This(), receiver), copy, args), expr)


def rewrite_call_sites(typed: TypedAst, plans: list[WrapperPlan]) -> tuple[Program, list[Diagnostic]]:
    """Core program text for `typed`: group methods moved into wrappers and every group call site rewritten."""
    rewriter = _CallSiteRewriter(typed, plans)
    plans_by_element = {p.element_class.name: p for p in plans}
    rewritten = []
    for decl in typed.program.classes:
        if typed.table.get(decl.name) is None or typed.table[decl.name].decl is not decl:
            continue
        rewritten.append(rewriter.rewrite_class(decl))

    # escapes anywhere in the program may add copies to any wrapper, so wrappers are built last
    classes = []
    for stripped, moved in rewritten:
        classes.append(stripped)
        plan = plans_by_element.get(stripped.name)
        if plan is not None:
            classes.append(synthesize_wrapper(plan, moved))
    program = replace(typed.program, classes=classes)
    program.span = typed.program.span
    log.debug(f"Rewrote {rewriter.rewritten} group call sites")

    for node in walk(program):
        if isinstance(node, QualifiedThis) or (isinstance(node, MethodDecl) and node.is_group):
            rewriter.error("group construct survived desugaring", node.span)
    return program, rewriter.diagnostics


def desugar(typed: TypedAst) -> DesugarResult:
    """Lower an attributed program to core code and attribute the result with group features disabled."""
    if typed.policy != LookupPolicy.STATIC:
        raise ValueError(f"Not sure how to desugar a program attributed with policy={typed.policy}")
    plans = plan_wrappers(typed.table)
    program, diagnostics = rewrite_call_sites(typed, plans)
    if diagnostics:
        return DesugarResult(None, diagnostics)

    entered = enter(program, core=True)
    attributed = attribute(program, entered.table)
    internal = [
        Diagnostic("E099", f"desugared program does not check: {d.message}", d.span, notes=(d.format(),))
        for d in entered.diagnostics + attributed.diagnostics
    ]
    if not internal:
        expected = typed.table.copy()
        strip_group_methods(expected, plans)
        internal = _shape_mismatches(expected, entered.table)
    if internal:
        return DesugarResult(None, internal)
    return DesugarResult(CoreProgram(program, attributed.typed, plans), [])



def _shape_mismatches(expected: SymbolTable, core: SymbolTable) -> list[Diagnostic]:
    """Compare the stripped symbol table against the one entered from the emitted core program."""
    found = []
    for cls in expected.user_classes():
        actual = core.get(cls.name)
        span = cls.decl.span if cls.decl is not None else SYNTHETIC_SPAN
        if actual is None:
            found.append(Diagnostic("E099", f"class '{cls.name}' is missing from the desugared program", span))
            continue
        if actual.superclass.name != cls.superclass.name:
            message = f"'{cls.name}' extends '{actual.superclass.name}', expected '{cls.superclass.name}'"
            found.append(Diagnostic("E099", message, span))
        if set(actual.instance_methods) != set(cls.instance_methods) or actual.group_methods:
            found.append(Diagnostic("E099", f"members of '{cls.name}' changed during desugaring", span))
    return found
