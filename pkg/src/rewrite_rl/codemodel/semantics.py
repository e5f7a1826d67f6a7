"""Scope resolution and static checks.

``resolve`` binds every variable reference (``Var`` or ``ArrayAccess`` node,
identified by its path) to the path of the ``VarDecl`` it refers to. Decl
paths are the identity of a variable everywhere else in the package, so a
shadowing local is a different variable from the outer one it hides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from ..errors import SemanticError
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
    Node,
    Path,
    TranslationUnit,
    Var,
    VarDecl,
)


def c_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def c_mod(a: int, b: int) -> int:
    return a - b * c_div(a, b)


_ARITH: Dict[str, Callable[[int, int], int]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": c_div,
    "%": c_mod,
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
}


def apply_op(op: str, a: int, b: int) -> int:
    return _ARITH[op](a, b)


@dataclass
class Bindings:
    decls: Dict[Path, VarDecl] = field(default_factory=dict)
    refs: Dict[Path, Path] = field(default_factory=dict)
    # decl path -> path of the function it belongs to (None for globals)
    owner: Dict[Path, Optional[Path]] = field(default_factory=dict)

    def decl_of(self, ref_path: Path) -> VarDecl:
        return self.decls[self.refs[ref_path]]

    def const_value(self, expr) -> Optional[int]:
        """Fold ``expr`` if it only involves literals and named constants."""
        return _fold(expr, self, None)


def _fold(expr, bindings: Bindings, path: Optional[Path]) -> Optional[int]:
    # path is needed to look up Var bindings; callers without one use names
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, Var):
        decl = None
        if path is not None and path in bindings.refs:
            decl = bindings.decls[bindings.refs[path]]
        else:
            for d in bindings.decls.values():
                if d.name == expr.name and d.const and d.scope == "global":
                    decl = d
        if decl is None or not decl.const:
            return None
        return _fold(decl.init, bindings, None)
    if isinstance(expr, BinOp):
        a = _fold(expr.lhs, bindings, None if path is None else path + (0,))
        b = _fold(expr.rhs, bindings, None if path is None else path + (1,))
        if a is None or b is None or (expr.op in "/%" and b == 0):
            return None
        return apply_op(expr.op, a, b)
    return None


class _Resolver:
    def __init__(self, unit: TranslationUnit):
        self.unit = unit
        self.b = Bindings()
        self.scopes: List[Dict[str, Path]] = []
        self.function: Optional[Path] = None
        self.loop_depth = 0
        self.functions = {fn.name: fn for fn in unit.functions}

    def fail(self, message: str):
        where = ""
        if self.function is not None:
            where = f"in function {self.unit.functions[self.function[0] - len(self.unit.globals)].name!r}: "
        raise SemanticError(where + message)

    def lookup(self, name: str) -> Path:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        self.fail(f"undeclared identifier {name!r}")

    def declare(self, decl: VarDecl, path: Path):
        scope = self.scopes[-1]
        if decl.name in scope:
            self.fail(f"redeclaration of {decl.name!r}")
        if decl.name in self.functions and decl.scope == "global":
            self.fail(f"{decl.name!r} declared as both variable and function")
        for i, dim in enumerate(decl.dims):
            self.expr(dim, path + (i,), array_ok=False)
            value = _fold(dim, self.b, path + (i,))
            if value is None:
                self.fail(f"extent of {decl.name!r} is not a compile-time constant")
            if value < 1:
                self.fail(f"extent of {decl.name!r} must be positive, got {value}")
        if decl.init is not None:
            self.expr(decl.init, path + (len(decl.dims),))
            if decl.const and _fold(decl.init, self.b, path + (len(decl.dims),)) is None:
                self.fail(f"initializer of const {decl.name!r} is not constant")
        scope[decl.name] = path
        self.b.decls[path] = decl
        self.b.owner[path] = self.function

    def run(self) -> Bindings:
        self.scopes.append({})
        n_globals = len(self.unit.globals)
        for i, g in enumerate(self.unit.globals):
            self.declare(g, (i,))
        seen = set()
        for k, fn in enumerate(self.unit.functions):
            if fn.name in seen:
                raise SemanticError(f"duplicate function {fn.name!r}")
            seen.add(fn.name)
            self.function = (n_globals + k,)
            self.fn(fn, self.function)
        self.function = None
        return self.b

    def fn(self, fn: FunctionDef, path: Path):
        self.scopes.append({})
        for i, p in enumerate(fn.params):
            if p.name in self.scopes[-1]:
                self.fail(f"duplicate parameter {p.name!r}")
            self.declare(p, path + (i,))
        self.block(fn.body, path + (len(fn.params),), new_scope=False)
        self.scopes.pop()

    def block(self, block: Block, path: Path, new_scope: bool = True):
        if new_scope:
            self.scopes.append({})
        for i, s in enumerate(block.stmts):
            self.stmt(s, path + (i,))
        if new_scope:
            self.scopes.pop()

    def stmt(self, s: Node, path: Path):
        if isinstance(s, Block):
            self.block(s, path)
        elif isinstance(s, Decl):
            self.declare(s.var, path + (0,))
        elif isinstance(s, Assign):
            self.assign(s, path)
        elif isinstance(s, Call):
            self.expr(s, path)
        elif isinstance(s, If):
            self.expr(s.cond, path + (0,))
            self.stmt(s.then, path + (1,))
            if s.else_ is not None:
                self.stmt(s.else_, path + (2,))
        elif isinstance(s, For):
            self.for_(s, path)
        elif isinstance(s, (Break, Continue)):
            if self.loop_depth == 0:
                self.fail(f"{type(s).__name__.lower()} outside of a for loop")
        else:
            self.fail(f"unexpected statement {type(s).__name__}")

    def for_(self, s: For, path: Path):
        init, step = s.init, s.step
        if not isinstance(init.lhs, Var):
            self.fail("for-loop init must assign a scalar loop variable")
        if not isinstance(step.lhs, Var) or step.lhs.name != init.lhs.name:
            self.fail(f"for-loop step must update loop variable {init.lhs.name!r}")
        self.assign(init, path + (0,))
        self.expr(s.cond, path + (1,))
        self.assign(step, path + (2,))
        for p, n in _var_refs(step.rhs, path + (2, 1)):
            decl = self.b.decl_of(p)
            if n != init.lhs.name and not decl.const:
                self.fail(f"for-loop step may only mention loop variable {init.lhs.name!r}")
        self.loop_depth += 1
        self.stmt(s.body, path + (3,))
        self.loop_depth -= 1

    def assign(self, s: Assign, path: Path):
        self.expr(s.lhs, path + (0,), array_ok=False)
        decl = self.b.decl_of(path + (0,))
        if decl.const:
            self.fail(f"assignment to const {decl.name!r}")
        self.expr(s.rhs, path + (1,))

    def expr(self, e: Node, path: Path, array_ok: bool = False):
        if isinstance(e, IntLit):
            return
        if isinstance(e, Var):
            target = self.lookup(e.name)
            self.b.refs[path] = target
            if self.b.decls[target].is_array and not array_ok:
                self.fail(f"array {e.name!r} used without indices")
        elif isinstance(e, ArrayAccess):
            target = self.lookup(e.base)
            self.b.refs[path] = target
            decl = self.b.decls[target]
            if len(e.indices) != len(decl.dims):
                self.fail(
                    f"{e.base!r} has {len(decl.dims)} dimension(s) but is indexed with {len(e.indices)}"
                )
            for i, idx in enumerate(e.indices):
                self.expr(idx, path + (i,))
        elif isinstance(e, BinOp):
            self.expr(e.lhs, path + (0,))
            self.expr(e.rhs, path + (1,))
        elif isinstance(e, Call):
            callee = self.functions.get(e.name)
            if callee is not None and len(callee.params) != len(e.args):
                self.fail(f"{e.name!r} expects {len(callee.params)} argument(s), got {len(e.args)}")
            for i, arg in enumerate(e.args):
                self.expr(arg, path + (i,), array_ok=True)
        else:
            self.fail(f"unexpected expression {type(e).__name__}")


def _var_refs(e: Node, path: Path):
    if isinstance(e, Var):
        yield path, e.name
    elif isinstance(e, BinOp):
        yield from _var_refs(e.lhs, path + (0,))
        yield from _var_refs(e.rhs, path + (1,))
    elif isinstance(e, (ArrayAccess, Call)):
        seq = e.indices if isinstance(e, ArrayAccess) else e.args
        for i, sub in enumerate(seq):
            yield from _var_refs(sub, path + (i,))


def resolve(unit: TranslationUnit) -> Bindings:
    return _Resolver(unit).run()


def check_unit(unit: TranslationUnit) -> Bindings:
    """Validate every code-model invariant; raises SemanticError."""
    return resolve(unit)
