# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""Canonical pretty-printer for SwarmLang syntax trees."""

from dataclasses import dataclass
from typing import Optional

from src.frontend.syntax import (
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
    Unary,
    While,
)
from src.frontend.tokens import GROUP_ANNOTATION

__all__ = ["EmitConfig", "emit", "emit_class", "emit_files"]

_BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3,
    "!=": 3,
    "<": 4,
    "<=": 4,
    ">": 4,
    ">=": 4,
    "+": 5,
    "-": 5,
    "*": 6,
    "/": 6,
}
_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def _needs_parens(e: Expr) -> bool:
    """Operators and negative literals need parentheses after a prefix operator or before `.`."""
    return isinstance(e, (Binary, Unary)) or (isinstance(e, IntLit) and e.value < 0)


@dataclass(frozen=True)
class EmitConfig:
    indent_width: int = 4
    include_group_annotations: bool = True
    newline: str = "\n"

    def __post_init__(self):
        if self.indent_width < 1:
            raise ValueError(f"Not sure how to indent with indent_width={self.indent_width}, it must be at least 1")


class _Emitter:
    def __init__(self, cfg: EmitConfig):
        self.cfg = cfg
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str) -> None:
        self.lines.append(" " * (self.cfg.indent_width * self.depth) + text)

    # Declarations

    def class_decl(self, decl: ClassDecl) -> None:
        header = f"class {decl.name}"
        if decl.superclass is not None:
            header += f" extends {decl.superclass}"
        self.line(header + " {")
        self.depth += 1
        for f in decl.fields:
            self.line(f"{f.type} {f.name};")
        members: list = list(decl.constructors) + list(decl.methods)
        for i, member in enumerate(members):
            if i > 0 or decl.fields:
                self.lines.append("")
            if isinstance(member, ConstructorDecl):
                self.body(f"{member.name}({self.params(member.params)})", member.body)
            else:
                self.method(member)
        self.depth -= 1
        self.line("}")

    def method(self, m: MethodDecl) -> None:
        modifiers = ""
        if m.is_group and self.cfg.include_group_annotations:
            modifiers += GROUP_ANNOTATION + " "
        if m.is_static:
            modifiers += "static "
        self.body(f"{modifiers}{m.return_type} {m.name}({self.params(m.params)})", m.body)

    @staticmethod
    def params(params: list[Param]) -> str:
        return ", ".join(f"{p.type} {p.name}" for p in params)

    def body(self, header: str, block: Block) -> None:
        self.line(header + " {")
        self.statements(block)
        self.line("}")

    def statements(self, block: Block) -> None:
        self.depth += 1
        for s in block.statements:
            self.stmt(s)
        self.depth -= 1

    # Statements

    def simple(self, s: Stmt) -> str:
        """Statements that can appear in a for header, without the trailing ';'."""
        match s:
            case LocalDecl():
                return f"{s.type} {s.name}" + ("" if s.init is None else f" = {self.expr(s.init)}")
            case Assign():
                return f"{self.expr(s.target)} {s.op} {self.expr(s.value)}"
            case ExprStmt():
                return self.expr(s.expr)
        raise TypeError(f"Not sure how to emit {type(s).__name__} in a for header")

    def stmt(self, s: Stmt) -> None:
        match s:
            case Block():
                self.nested_block(s)
            case LocalDecl() | Assign() | ExprStmt():
                self.line(self.simple(s) + ";")
            case SuperConstructorCall():
                self.line(f"super({self.args(s.args)});")
            case If():
                self.if_chain(s, "")
            case While():
                self.body(f"while ({self.expr(s.condition)})", s.body)
            case For():
                header = "for (" + ("" if s.init is None else self.simple(s.init)) + ";"
                header += "" if s.condition is None else " " + self.expr(s.condition)
                header += ";" + ("" if s.update is None else " " + self.simple(s.update)) + ")"
                self.body(header, s.body)
            case ForEach():
                self.body(f"for ({s.type} {s.name} : {self.expr(s.iterable)})", s.body)
            case Return():
                self.line("return;" if s.value is None else f"return {self.expr(s.value)};")
            case Print():
                self.line(f"print({self.expr(s.value)});")
            case _:
                raise TypeError(f"Not sure how to emit statement {type(s).__name__}")

    def nested_block(self, block: Block) -> None:
        self.line("{")
        self.statements(block)
        self.line("}")

    def if_chain(self, s: If, prefix: str) -> None:
        self.line(f"{prefix}if ({self.expr(s.condition)}) {{")
        self.statements(s.then)
        otherwise: Optional[Block] = s.otherwise
        if otherwise is None:
            self.line("}")
        elif len(otherwise.statements) == 1 and isinstance(otherwise.statements[0], If):
            self.if_chain(otherwise.statements[0], "} else ")
        else:
            self.line("} else {")
            self.statements(otherwise)
            self.line("}")

    # Expressions

    def args(self, args: list[Expr]) -> str:
        return ", ".join(self.expr(a) for a in args)

    def expr(self, e: Expr) -> str:
        match e:
            case IntLit():
                return str(e.value)
            case BoolLit():
                return "true" if e.value else "false"
            case StrLit():
                return '"' + "".join(_ESCAPES.get(ch, ch) for ch in e.value) + '"'
            case NullLit():
                return "null"
            case This():
                return "this"
            case QualifiedThis():
                return f"{e.qualifier}.this"
            case Name():
                return e.name
            case FieldAccess():
                return f"{self.receiver(e.target)}.{e.name}"
            case Call():
                prefix = "" if e.receiver is None else self.receiver(e.receiver) + "."
                return f"{prefix}{e.name}({self.args(e.args)})"
            case SuperCall():
                return f"super.{e.name}({self.args(e.args)})"
            case New():
                return f"new {e.class_name}({self.args(e.args)})"
            case NewCollection():
                return f"new Collection<{e.element}>()"
            case Unary():
                operand = self.expr(e.operand)
                if _needs_parens(e.operand):
                    operand = f"({operand})"
                return f"{e.op}{operand}"
            case Binary():
                precedence = _BINARY_PRECEDENCE[e.op]
                left = self.operand(e.left, precedence, right=False)
                right = self.operand(e.right, precedence, right=True)
                return f"{left} {e.op} {right}"
        raise TypeError(f"Not sure how to emit expression {type(e).__name__}")

    def receiver(self, e: Expr) -> str:
        text = self.expr(e)
        return f"({text})" if _needs_parens(e) else text

    def operand(self, e: Expr, parent: int, right: bool) -> str:
        text = self.expr(e)
        if isinstance(e, Binary):
            child = _BINARY_PRECEDENCE[e.op]
            if child < parent or (right and child == parent):
                return f"({text})"
        return text


def emit_class(decl: ClassDecl, cfg: EmitConfig = EmitConfig()) -> str:
    emitter = _Emitter(cfg)
    emitter.class_decl(decl)
    return cfg.newline.join(emitter.lines) + cfg.newline


def emit(program: Program, cfg: EmitConfig = EmitConfig()) -> str:
    """Canonical source text for every class of `program`, blank-line separated."""
    return cfg.newline.join(emit_class(c, cfg) for c in program.classes) or cfg.newline


def emit_files(program: Program, cfg: EmitConfig = EmitConfig()) -> dict[str, str]:
    """Canonical source text per originating file, in first-appearance order."""
    return {
        path: emit(Program([c for c in program.classes if c.file == path]), cfg) for path in program.files()
    }
