"""Pretty-printer: Allman braces, 4-space indent, minimal parentheses.

Assignments of the form ``x = x + 1`` print as ``x++`` and ``x = x op e`` as
``x op= e``; the parser desugars both back to the same tree, so output
round-trips structurally.
"""

from __future__ import annotations

from typing import List

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
    TranslationUnit,
    Var,
    VarDecl,
)

INDENT = "    "

_LEVEL = {"==": 0, "!=": 0, "<": 1, "<=": 1, ">": 1, ">=": 1, "+": 2, "-": 2, "*": 3, "/": 3, "%": 3}


def print_expr(e, level: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ArrayAccess):
        return e.base + "".join(f"[{print_expr(i)}]" for i in e.indices)
    if isinstance(e, Call):
        return f"{e.name}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, BinOp):
        mine = _LEVEL[e.op]
        # left-associative: a right operand at the same level needs parentheses
        text = f"{print_expr(e.lhs, mine)} {e.op} {print_expr(e.rhs, mine + 1)}"
        return f"({text})" if mine < level else text
    raise TypeError(f"not an expression: {e!r}")


def print_assign(s: Assign) -> str:
    lhs = print_expr(s.lhs)
    rhs = s.rhs
    if isinstance(rhs, BinOp) and rhs.lhs == s.lhs and rhs.op in "+-*/%":
        if rhs.op in "+-" and rhs.rhs == IntLit(1):
            return lhs + rhs.op * 2
        return f"{lhs} {rhs.op}= {print_expr(rhs.rhs, _LEVEL[rhs.op] + 1)}"
    return f"{lhs} = {print_expr(rhs)}"


def print_decl(d: VarDecl) -> str:
    text = ("const " if d.const else "") + "int " + d.name
    text += "".join(f"[{print_expr(x)}]" for x in d.dims)
    if d.init is not None:
        text += f" = {print_expr(d.init)}"
    return text


class _Printer:
    def __init__(self):
        self.lines: List[str] = []

    def emit(self, depth: int, text: str):
        self.lines.append(INDENT * depth + text)

    def stmt(self, s, depth: int):
        if isinstance(s, Block):
            self.emit(depth, "{")
            for sub in s.stmts:
                self.stmt(sub, depth + 1)
            self.emit(depth, "}")
        elif isinstance(s, For):
            for p in s.pragmas:
                self.emit(depth, p.raw)
            self.emit(depth, f"for ({print_assign(s.init)}; {print_expr(s.cond)}; {print_assign(s.step)})")
            self.body(s.body, depth)
        elif isinstance(s, If):
            self.emit(depth, f"if ({print_expr(s.cond)})")
            self.body(s.then, depth)
            if s.else_ is not None:
                self.emit(depth, "else")
                self.body(s.else_, depth)
        elif isinstance(s, Assign):
            self.emit(depth, print_assign(s) + ";")
        elif isinstance(s, Call):
            self.emit(depth, print_expr(s) + ";")
        elif isinstance(s, Break):
            self.emit(depth, "break;")
        elif isinstance(s, Continue):
            self.emit(depth, "continue;")
        elif isinstance(s, Decl):
            self.emit(depth, print_decl(s.var) + ";")
        else:
            raise TypeError(f"not a statement: {s!r}")

    def body(self, s, depth: int):
        self.stmt(s, depth if isinstance(s, Block) else depth + 1)

    def function(self, fn: FunctionDef):
        params = ", ".join(print_decl(p) for p in fn.params)
        self.emit(0, f"void {fn.name}({params})")
        self.stmt(fn.body, 0)


def print_unit(unit: TranslationUnit) -> str:
    p = _Printer()
    for g in unit.globals:
        p.emit(0, print_decl(g) + ";")
    for i, fn in enumerate(unit.functions):
        if i or unit.globals:
            p.emit(0, "")
        p.function(fn)
    return "\n".join(p.lines) + "\n" if p.lines else ""
