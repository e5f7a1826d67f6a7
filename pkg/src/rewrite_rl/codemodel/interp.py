"""Reference interpreter, used as the semantic oracle for rewrite rules.

Arrays are stored flat in row-major order, both internally and at the
input/output boundary, so a multi-dimensional array and its flattened form
compare equal. Integers are unbounded; ``/`` and ``%`` truncate toward zero as
in C. Uninitialised scalars and arrays read as zero.
"""

from __future__ import annotations

from math import prod
from typing import Dict, List, Mapping, Union

from ..errors import (
    DivisionByZero,
    InterpretError,
    OutOfBounds,
    StepBudgetExceeded,
    UndefinedFunction,
)
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
    walk,
)
from .semantics import Bindings, apply_op, check_unit

DEFAULT_STEP_BUDGET = 10**7

Value = Union[int, List[int]]


class _Array:
    __slots__ = ("name", "dims", "data")

    def __init__(self, name: str, dims: List[int], data: List[int]):
        self.name = name
        self.dims = dims
        self.data = data


class _Break(Exception):
    pass


class _Continue(Exception):
    pass


def _flatten(value) -> List[int]:
    if isinstance(value, (list, tuple)):
        out = []
        for v in value:
            out.extend(_flatten(v))
        return out
    return [int(value)]


class Interpreter:
    def __init__(self, unit: TranslationUnit, step_budget: int = DEFAULT_STEP_BUDGET):
        self.unit = unit
        self.bindings: Bindings = check_unit(unit)
        self.budget = step_budget
        self.steps = 0
        self.functions = {fn.name: fn for fn in unit.functions}
        for _, node in walk(unit):
            if isinstance(node, Call) and node.name not in self.functions:
                raise UndefinedFunction(f"call to undefined function {node.name!r}")

    def tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise StepBudgetExceeded(f"step budget of {self.budget} exceeded")

    def extent(self, decl: VarDecl) -> List[int]:
        return [self.bindings.const_value(d) for d in decl.dims]

    def new_cell(self, decl: VarDecl):
        if decl.is_array:
            dims = self.extent(decl)
            return _Array(decl.name, dims, [0] * prod(dims))
        return [0]

    def run(self, entry: str, inputs: Mapping[str, object]) -> Dict[str, Value]:
        if entry not in self.functions:
            raise InterpretError(f"no function named {entry!r}")
        fn = self.functions[entry]
        global_env: Dict[str, object] = {}
        for g in self.unit.globals:
            cell = self.new_cell(g)
            if g.name in inputs:
                self._load(cell, g, inputs[g.name])
            elif g.init is not None:
                cell[0] = self.eval(g.init, [global_env])
            global_env[g.name] = cell
        frame: Dict[str, object] = {}
        for p in fn.params:
            if p.name not in inputs:
                raise InterpretError(f"missing input for parameter {p.name!r}")
            cell = self.new_cell(p)
            self._load(cell, p, inputs[p.name])
            frame[p.name] = cell
        self.written_globals = set()
        self.block(fn.body, [global_env, frame])

        out: Dict[str, Value] = {}
        for p in fn.params:
            if p.is_array:
                out[p.name] = list(frame[p.name].data)
        for g in self.unit.globals:
            if g.name in self.written_globals:
                cell = global_env[g.name]
                out[g.name] = list(cell.data) if g.is_array else cell[0]
        return out

    def _load(self, cell, decl: VarDecl, value):
        if decl.is_array:
            flat = _flatten(value)
            if len(flat) != len(cell.data):
                raise InterpretError(
                    f"input for {decl.name!r} has {len(flat)} elements, expected {len(cell.data)}"
                )
            cell.data[:] = flat
        else:
            if isinstance(value, (list, tuple)):
                raise InterpretError(f"scalar {decl.name!r} given an array input")
            cell[0] = int(value)

    # statements
    def block(self, block: Block, env: list):
        env = env + [{}]
        for s in block.stmts:
            self.stmt(s, env)

    def stmt(self, s, env: list):
        self.tick()
        if isinstance(s, Assign):
            self.assign(s, env)
        elif isinstance(s, Block):
            self.block(s, env)
        elif isinstance(s, For):
            self.for_(s, env)
        elif isinstance(s, If):
            if self.eval(s.cond, env):
                self.stmt(s.then, env)
            elif s.else_ is not None:
                self.stmt(s.else_, env)
        elif isinstance(s, Decl):
            cell = self.new_cell(s.var)
            if s.var.init is not None:
                cell[0] = self.eval(s.var.init, env)
            env[-1][s.var.name] = cell
        elif isinstance(s, Call):
            self.call(s, env)
        elif isinstance(s, Break):
            raise _Break()
        elif isinstance(s, Continue):
            raise _Continue()
        else:
            raise InterpretError(f"cannot execute {type(s).__name__}")

    def for_(self, s: For, env: list):
        self.assign(s.init, env)
        while self.eval(s.cond, env):
            self.tick()
            try:
                self.stmt(s.body, env)
            except _Break:
                break
            except _Continue:
                pass
            self.assign(s.step, env)

    def lookup(self, name: str, env: list):
        for scope in reversed(env):
            if name in scope:
                if scope is env[0]:
                    return scope[name], True
                return scope[name], False
        raise InterpretError(f"unbound variable {name!r}")

    def assign(self, s: Assign, env: list):
        value = self.eval(s.rhs, env)
        lhs = s.lhs
        if isinstance(lhs, Var):
            cell, is_global = self.lookup(lhs.name, env)
            cell[0] = value
        else:
            arr, is_global = self.lookup(lhs.base, env)
            arr.data[self.offset(arr, lhs, env)] = value
            name = lhs.base
        if is_global:
            self.written_globals.add(lhs.name if isinstance(lhs, Var) else name)

    def offset(self, arr: _Array, access: ArrayAccess, env: list) -> int:
        flat = 0
        for idx, extent in zip(access.indices, arr.dims):
            i = self.eval(idx, env)
            if not 0 <= i < extent:
                raise OutOfBounds(f"index {i} out of bounds for {arr.name!r} (extent {extent})")
            flat = flat * extent + i
        return flat

    def call(self, c: Call, env: list):
        fn: FunctionDef = self.functions[c.name]
        frame: Dict[str, object] = {}
        for p, arg in zip(fn.params, c.args):
            if p.is_array:
                if not isinstance(arg, Var):
                    raise InterpretError(f"array parameter {p.name!r} needs an array argument")
                arr, _ = self.lookup(arg.name, env)
                if not isinstance(arr, _Array) or len(arr.data) != prod(self.extent(p)):
                    raise InterpretError(f"argument for {p.name!r} has the wrong shape")
                frame[p.name] = _Array(p.name, self.extent(p), arr.data)
            else:
                frame[p.name] = [self.eval(arg, env)]
        self.block(fn.body, [env[0], frame])

    def eval(self, e, env: list) -> int:
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, Var):
            cell, _ = self.lookup(e.name, env)
            return cell[0]
        if isinstance(e, ArrayAccess):
            arr, _ = self.lookup(e.base, env)
            return arr.data[self.offset(arr, e, env)]
        if isinstance(e, BinOp):
            a = self.eval(e.lhs, env)
            b = self.eval(e.rhs, env)
            if e.op in ("/", "%") and b == 0:
                raise DivisionByZero(f"division by zero in {e.op!r}")
            return apply_op(e.op, a, b)
        if isinstance(e, Call):
            raise InterpretError(f"void function {e.name!r} used as a value")
        raise InterpretError(f"cannot evaluate {type(e).__name__}")


def interpret(
    unit: TranslationUnit,
    entry: str,
    inputs: Mapping[str, object],
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> Dict[str, Value]:
    """Run ``entry`` on ``inputs``; returns array parameters and written globals."""
    return Interpreter(unit, step_budget).run(entry, inputs)
