# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import logging
from typing import Callable, Optional, TypeVar

from src.diagnostics import Diagnostic, Span
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
)
from src.frontend.lexer import INT64_MAX
from src.frontend.tokens import Token, TokenKind

__all__ = ["ParseResult", "parse"]

log = logging.getLogger(__name__)

N = TypeVar("N")

ASSIGNMENT_OPS = ("=", "+=", "-=", "*=", "/=")
# Binary precedence levels, loosest first.
BINARY_LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/"))
VALUE_TYPE_KEYWORDS = ("int", "boolean", "string", COLLECTION_TYPE)


class _SyntaxError(Exception):
    pass


class ParseResult:
    def __init__(self, program: Program, diagnostics: list[Diagnostic]):
        self.program = program
        self.diagnostics = diagnostics

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class _Parser:
    def __init__(self, tokens: list[Token], group_features: bool):
        if not tokens or tokens[-1].kind != TokenKind.EOF:
            raise ValueError("Not sure how to parse a token list without an end-of-input sentinel")
        self.tokens = tokens
        self.pos = 0
        self.group_features = group_features
        self.diagnostics: list[Diagnostic] = []

    # Token plumbing

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    @property
    def prev(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tok
        if token.kind != TokenKind.EOF:
            self.pos += 1
        return token

    def at(self, lexeme: str) -> bool:
        return self.tok.kind in (TokenKind.KEYWORD, TokenKind.PUNCTUATION) and self.tok.lexeme == lexeme

    def accept(self, lexeme: str) -> bool:
        if self.at(lexeme):
            self.advance()
            return True
        return False

    def expect(self, *lexemes: str) -> Token:
        for lexeme in lexemes:
            if self.at(lexeme):
                return self.advance()
        self.fail(*(f"'{lexeme}'" for lexeme in lexemes))

    def fail(self, *expected: str):
        wanted = expected[0] if len(expected) == 1 else "one of " + ", ".join(expected)
        self.diagnostics.append(Diagnostic("E002", f"expected {wanted}, found {self.tok.describe()}", self.tok.span))
        raise _SyntaxError()

    def error(self, code: str, message: str, span: Span) -> None:
        self.diagnostics.append(Diagnostic(code, message, span))

    def span_from(self, start: Token) -> Span:
        return start.span.to(self.prev.span)

    def identifier(self) -> Token:
        if self.tok.kind != TokenKind.IDENTIFIER:
            self.fail("identifier")
        token = self.advance()
        if "$" in token.lexeme and self.group_features:
            message = f"identifier '{token.lexeme}' uses '$', which is reserved for generated classes"
            self.error("E015", message, token.span)
        return token

    def comma_list(self, item: Callable[[], N], close: str) -> list[N]:
        items: list[N] = []
        if not self.at(close):
            items.append(item())
            while self.accept(","):
                items.append(item())
        self.expect(close)
        return items

    # Declarations

    def program(self) -> Program:
        start = self.tok
        classes = []
        while self.tok.kind != TokenKind.EOF:
            try:
                classes.append(self.class_decl())
            except _SyntaxError:
                self.recover_to_class()
        return Program(classes, span=self.span_from(start) if classes else start.span)

    def recover_to_class(self) -> None:
        self.advance()
        while self.tok.kind != TokenKind.EOF and not self.at("class"):
            self.advance()

    def class_decl(self) -> ClassDecl:
        start = self.expect("class")
        name = self.identifier().lexeme
        superclass = self.identifier().lexeme if self.accept("extends") else None
        self.expect("{")
        decl = ClassDecl(name, superclass)
        while not self.accept("}"):
            if self.tok.kind == TokenKind.EOF:
                self.fail("'}'")
            self.member(decl)
        decl.span = self.span_from(start)
        return decl

    def member(self, decl: ClassDecl) -> None:
        start = self.tok
        is_group = False
        if self.tok.kind == TokenKind.ANNOTATION:
            is_group = True
            if not self.group_features:
                self.error("E004", "'@group' is not available when group features are disabled", self.tok.span)
            self.advance()
        is_static = self.accept("static")
        if is_group and is_static:
            self.error("E003", "a static method cannot be a group method", self.span_from(start))

        if self.tok.kind == TokenKind.IDENTIFIER and self.tok.lexeme == decl.name and self.peek().lexeme == "(":
            if is_group:
                self.error("E003", "a constructor cannot be a group method", self.span_from(start))
            if is_static:
                self.error("E002", "a constructor cannot be static", self.span_from(start))
            name = self.identifier().lexeme
            self.expect("(")
            params = self.comma_list(self.param, ")")
            body = self.block()
            decl.constructors.append(ConstructorDecl(name, params, body, span=self.span_from(start)))
            return

        type_expr = self.type_expr(allow_void=True)
        name = self.identifier().lexeme
        if self.accept(";"):
            if is_group or is_static:
                self.error("E002", f"field '{name}' cannot be static or annotated", self.span_from(start))
            if type_expr.name == "void":
                self.error("E016", f"field '{name}' cannot have type void", type_expr.span)
            decl.fields.append(FieldDecl(type_expr, name, span=self.span_from(start)))
            return
        self.expect("(")
        params = self.comma_list(self.param, ")")
        body = self.block()
        method = MethodDecl(name, params, type_expr, body, is_group=is_group, is_static=is_static)
        method.span = self.span_from(start)
        decl.methods.append(method)

    def param(self) -> Param:
        start = self.tok
        # void is rejected when the method is entered
        type_expr = self.type_expr(allow_void=True)
        name = self.identifier().lexeme
        return Param(type_expr, name, span=self.span_from(start))

    def type_expr(self, allow_void: bool = False) -> TypeExpr:
        start = self.tok
        if self.accept(COLLECTION_TYPE):
            self.expect("<")
            argument = self.type_expr()
            self.expect(">")
            return TypeExpr(COLLECTION_TYPE, argument, span=self.span_from(start))
        if self.at("int") or self.at("boolean") or self.at("string") or (allow_void and self.at("void")):
            return TypeExpr(self.advance().lexeme, span=start.span)
        if self.tok.kind == TokenKind.IDENTIFIER:
            return TypeExpr(self.identifier().lexeme, span=start.span)
        self.fail("type")

    # Statements

    def block(self) -> Block:
        start = self.expect("{")
        statements = []
        while not self.accept("}"):
            if self.tok.kind == TokenKind.EOF:
                self.fail("'}'")
            statements.append(self.statement())
        return Block(statements, span=self.span_from(start))

    def body(self) -> Block:
        """Loop and branch bodies are always blocks, braces or not."""
        if self.at("{"):
            return self.block()
        statement = self.statement()
        return Block([statement], span=statement.span)

    def statement(self) -> Stmt:
        start = self.tok
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            self.expect("(")
            condition = self.expression()
            self.expect(")")
            then = self.body()
            otherwise = self.body() if self.accept("else") else None
            return If(condition, then, otherwise, span=self.span_from(start))
        if self.accept("while"):
            self.expect("(")
            condition = self.expression()
            self.expect(")")
            return While(condition, self.body(), span=self.span_from(start))
        if self.at("for"):
            return self.for_statement()
        if self.accept("return"):
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return Return(value, span=self.span_from(start))
        if self.accept("print"):
            self.expect("(")
            value = self.expression()
            self.expect(")")
            self.expect(";")
            return Print(value, span=self.span_from(start))
        if self.at("super") and self.peek().lexeme == "(":
            self.advance()
            self.expect("(")
            args = self.comma_list(self.expression, ")")
            self.expect(";")
            return SuperConstructorCall(args, span=self.span_from(start))
        statement = self.local_decl() if self.at_decl_start() else self.simple_statement()
        self.expect(";")
        statement.span = self.span_from(start)
        return statement

    def at_decl_start(self) -> bool:
        if any(self.at(keyword) for keyword in VALUE_TYPE_KEYWORDS):
            return True
        return self.tok.kind == TokenKind.IDENTIFIER and self.peek().kind == TokenKind.IDENTIFIER

    def local_decl(self) -> LocalDecl:
        start = self.tok
        type_expr = self.type_expr()
        name = self.identifier().lexeme
        init = self.expression() if self.accept("=") else None
        return LocalDecl(type_expr, name, init, span=self.span_from(start))

    def simple_statement(self) -> Stmt:
        """Assignment, increment or expression statement, without the trailing ';'."""
        start = self.tok
        expr = self.expression()
        if self.tok.kind == TokenKind.PUNCTUATION and self.tok.lexeme in ASSIGNMENT_OPS + ("++", "--"):
            if not isinstance(expr, (Name, FieldAccess)):
                self.error("E002", "invalid assignment target", expr.span)
            op = self.advance().lexeme
            if op in ("++", "--"):
                one = IntLit(1, span=self.prev.span)
                return Assign(expr, "+=" if op == "++" else "-=", one, span=self.span_from(start))
            value = self.expression()
            return Assign(expr, op, value, span=self.span_from(start))
        if not isinstance(expr, (Call, SuperCall, New)):
            self.error("E002", "not a statement", expr.span)
        return ExprStmt(expr, span=self.span_from(start))

    def for_statement(self) -> Stmt:
        start = self.expect("for")
        self.expect("(")
        init: Optional[Stmt] = None
        if self.at_decl_start():
            decl_start = self.tok
            type_expr = self.type_expr()
            name = self.identifier().lexeme
            if self.accept(":"):
                iterable = self.expression()
                self.expect(")")
                return ForEach(type_expr, name, iterable, self.body(), span=self.span_from(start))
            value = self.expression() if self.accept("=") else None
            init = LocalDecl(type_expr, name, value, span=self.span_from(decl_start))
        elif not self.at(";"):
            init = self.simple_statement()
        self.expect(";")
        condition = None if self.at(";") else self.expression()
        self.expect(";")
        update = None if self.at(")") else self.simple_statement()
        self.expect(")")
        return For(init, condition, update, self.body(), span=self.span_from(start))

    # Expressions

    def expression(self, level: int = 0) -> Expr:
        if level == len(BINARY_LEVELS):
            return self.unary()
        start = self.tok
        left = self.expression(level + 1)
        while self.tok.kind == TokenKind.PUNCTUATION and self.tok.lexeme in BINARY_LEVELS[level]:
            op = self.advance().lexeme
            right = self.expression(level + 1)
            left = Binary(op, left, right, span=self.span_from(start))
        return left

    def unary(self) -> Expr:
        start = self.tok
        if self.at("!") or self.at("-"):
            op = self.advance().lexeme
            if op == "-" and self.tok.kind == TokenKind.INTEGER:
                literal = self.advance()
                return IntLit(-literal.value, span=self.span_from(start))
            return Unary(op, self.unary(), span=self.span_from(start))
        return self.postfix()

    def postfix(self) -> Expr:
        start = self.tok
        expr = self.primary()
        while self.accept("."):
            name = self.identifier().lexeme
            if self.accept("("):
                args = self.comma_list(self.expression, ")")
                expr = Call(expr, name, args, span=self.span_from(start))
            else:
                expr = FieldAccess(expr, name, span=self.span_from(start))
        return expr

    def primary(self) -> Expr:
        start = self.tok
        if start.kind == TokenKind.INTEGER:
            self.advance()
            if start.value > INT64_MAX:
                self.error("E001", f"integer literal {start.lexeme} does not fit in 64 bits", start.span)
            return IntLit(start.value, span=start.span)
        if start.kind == TokenKind.STRING:
            self.advance()
            return StrLit(start.value, span=start.span)
        if self.accept("true") or self.accept("false"):
            return BoolLit(start.lexeme == "true", span=start.span)
        if self.accept("null"):
            return NullLit(span=start.span)
        if self.accept("this"):
            return This(span=start.span)
        if self.accept("new"):
            if self.accept(COLLECTION_TYPE):
                self.expect("<")
                element = self.type_expr()
                self.expect(">")
                self.expect("(")
                self.expect(")")
                return NewCollection(element, span=self.span_from(start))
            class_name = self.identifier().lexeme
            self.expect("(")
            args = self.comma_list(self.expression, ")")
            return New(class_name, args, span=self.span_from(start))
        if self.accept("super"):
            self.expect(".")
            name = self.identifier().lexeme
            self.expect("(")
            args = self.comma_list(self.expression, ")")
            return SuperCall(name, args, span=self.span_from(start))
        if start.kind == TokenKind.IDENTIFIER:
            if self.peek().lexeme == "." and self.peek(2).is_(TokenKind.KEYWORD, "this"):
                qualifier = self.identifier().lexeme
                self.advance()
                self.advance()
                span = self.span_from(start)
                if not self.group_features:
                    self.error("E004", f"'{qualifier}.this' is not available when group features are disabled", span)
                return QualifiedThis(qualifier, span=span)
            name = self.identifier().lexeme
            if self.accept("("):
                args = self.comma_list(self.expression, ")")
                return Call(None, name, args, span=self.span_from(start))
            return Name(name, span=start.span)
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr
        self.fail("expression")


def parse(tokens: list[Token], group_features: bool = True) -> ParseResult:
    """Parse a token list ending in an end-of-input sentinel into a :class:`Program`.

    On a syntax error the offending token is reported with what was expected there, and parsing resumes at the
    next `class` keyword so later classes still get checked. With `group_features=False` (core programs), `@group`
    and `T.this` are rejected and `$` is allowed in identifiers.
    """
    parser = _Parser(tokens, group_features)
    program = parser.program()
    log.debug(f"Parsed {len(program.classes)} classes with {len(parser.diagnostics)} diagnostics")
    return ParseResult(program, parser.diagnostics)
