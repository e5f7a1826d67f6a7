"""Tokenizer and recursive-descent parser for the C subset (see docs/grammar.md)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from ..errors import SourceSyntaxError
from .ast import (
    ArrayAccess,
    Assign,
    BinOp,
    Block,
    Break,
    Call,
    Continue,
    Decl,
    For,
    FunctionDef,
    If,
    IntLit,
    Pragma,
    TranslationUnit,
    Var,
    VarDecl,
)

KEYWORDS = {"int", "void", "const", "for", "if", "else", "break", "continue"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<pragma>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\+\+|--|\+=|-=|\*=|/=|%=|<=|>=|==|!=|[-+*/%<>=;,(){}\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int | ident | kw | op | pragma | eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise SourceSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text.strip() if kind == "pragma" else text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%"}
_PRECEDENCE = [("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%")]


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise SourceSyntaxError(f"{message} (found {found!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        name = self.tok.text
        self.pos += 1
        return name

    # top level
    def parse_unit(self) -> TranslationUnit:
        globals_, functions = [], []
        while self.tok.kind != "eof":
            if self.at("void"):
                functions.append(self.function())
            elif self.at("int") or self.at("const"):
                globals_.extend(self.declaration("global"))
            else:
                self.error("expected global declaration or function")
        return TranslationUnit(tuple(globals_), tuple(functions))

    def function(self) -> FunctionDef:
        self.expect("void")
        name = self.ident()
        self.expect("(")
        params = []
        if self.accept("void"):
            pass
        elif not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        return FunctionDef(name, tuple(params), self.block())

    def param(self) -> VarDecl:
        self.expect("int")
        name = self.ident()
        return VarDecl(name, self.dims(), "param")

    def dims(self) -> tuple:
        dims = []
        while self.accept("["):
            if self.tok.kind == "int":
                dims.append(IntLit(int(self.tok.text)))
                self.pos += 1
            elif self.tok.kind == "ident":
                dims.append(Var(self.ident()))
            else:
                self.error("array extent must be an integer literal or a named constant")
            self.expect("]")
        return tuple(dims)

    def declaration(self, scope: str) -> List[VarDecl]:
        const = self.accept("const")
        self.expect("int")
        decls = []
        while True:
            name = self.ident()
            dims = self.dims()
            init = None
            if self.accept("="):
                if dims:
                    self.error("array initializers are not supported")
                init = self.expr()
            if const and init is None:
                self.error("const declaration requires an initializer")
            decls.append(VarDecl(name, dims, scope, const, init))
            if not self.accept(","):
                break
        self.expect(";")
        return decls

    # statements
    def block(self) -> Block:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.extend(self.statement_list())
        self.expect("}")
        return Block(tuple(stmts))

    def statement_list(self) -> list:
        if self.at("int") or self.at("const"):
            return [Decl(d) for d in self.declaration("local")]
        return [self.statement()]

    def statement(self):
        tok = self.tok
        if tok.kind == "pragma":
            pragmas = []
            while self.tok.kind == "pragma":
                pragmas.append(self.pragma())
            if not self.at("for"):
                self.error("#pragma stml must immediately precede a for loop")
            return self.for_stmt(tuple(pragmas))
        if self.at("for"):
            return self.for_stmt(())
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.statement()
            else_ = self.statement() if self.accept("else") else None
            return If(cond, then, else_)
        if self.accept("break"):
            self.expect(";")
            return Break()
        if self.accept("continue"):
            self.expect(";")
            return Continue()
        if self.at("int") or self.at("const"):
            self.error("declaration not allowed here")
        stmt = self.simple()
        self.expect(";")
        return stmt

    def pragma(self) -> Pragma:
        tok = self.tok
        m = re.fullmatch(r"#\s*pragma\s+stml\s+(.+)", tok.text)
        if m is None:
            self.error("only '#pragma stml <kind>' directives are supported")
        self.pos += 1
        return Pragma(" ".join(m.group(1).split()), tok.text)

    def for_stmt(self, pragmas) -> For:
        self.expect("for")
        self.expect("(")
        init = self.simple()
        self.expect(";")
        cond = self.expr()
        self.expect(";")
        step = self.simple()
        self.expect(")")
        if not isinstance(init, Assign) or not isinstance(step, Assign):
            self.error("for-loop init and step must be assignments")
        return For(init, cond, step, self.statement(), pragmas)

    def simple(self):
        """Assignment (plain, compound, ++/--) or call statement."""
        start = self.tok
        if start.kind != "ident":
            self.error("expected statement")
        if self.tokens[self.pos + 1].text == "(":
            return self.call()
        lhs = self.lvalue()
        if self.accept("++"):
            return Assign(lhs, BinOp("+", lhs, IntLit(1)))
        if self.accept("--"):
            return Assign(lhs, BinOp("-", lhs, IntLit(1)))
        if self.tok.text in _COMPOUND:
            op = _COMPOUND[self.tok.text]
            self.pos += 1
            return Assign(lhs, BinOp(op, lhs, self.expr()))
        self.expect("=")
        return Assign(lhs, self.expr())

    def lvalue(self):
        name = self.ident()
        indices = []
        while self.accept("["):
            indices.append(self.expr())
            self.expect("]")
        return ArrayAccess(name, tuple(indices)) if indices else Var(name)

    def call(self) -> Call:
        name = self.ident()
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        return Call(name, tuple(args))

    # expressions
    def expr(self, level: int = 0):
        if level == len(_PRECEDENCE):
            return self.unary()
        lhs = self.expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in _PRECEDENCE[level]:
            op = self.tok.text
            self.pos += 1
            lhs = BinOp(op, lhs, self.expr(level + 1))
        return lhs

    def unary(self):
        if self.accept("-"):
            if self.tok.kind == "int":
                value = int(self.tok.text)
                self.pos += 1
                return IntLit(-value)
            return BinOp("-", IntLit(0), self.unary())
        if self.accept("+"):
            return self.unary()
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            return IntLit(int(tok.text))
        if tok.kind == "ident":
            if self.tokens[self.pos + 1].text == "(":
                return self.call()
            return self.lvalue()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected expression")


def parse(source: str, check: bool = True) -> TranslationUnit:
    """Parse C-subset source into a TranslationUnit.

    Raises SourceSyntaxError on grammar violations and, unless ``check`` is
    False, SemanticError on undeclared identifiers or bad index arity.
    """
    unit = Parser(source).parse_unit()
    if check:
        from .semantics import check_unit

        check_unit(unit)
    return unit
