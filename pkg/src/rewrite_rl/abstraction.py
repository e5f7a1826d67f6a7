"""Code abstraction: the fifteen-feature vector and its state key.

Variables are identified by the path of their declaration (see
``codemodel.semantics``), so shadowed names never get merged. "Before" and
"inside" a loop are judged in document (pre-order) order over the whole unit;
the init and step of an enclosing loop therefore come before its body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Set, Tuple

from .codemodel.ast import (
    ArrayAccess,
    Assign,
    BinOp,
    Break,
    Call,
    Continue,
    Decl,
    For,
    If,
    IntLit,
    Path,
    TranslationUnit,
    Var,
    VarDecl,
    children,
    walk,
)
from .codemodel.semantics import Bindings, resolve

StateKey = str


class FeatureVector(NamedTuple):
    max_nested_loop_depth: int = 0
    num_function_calls: int = 0
    num_shifted_array_writes: int = 0
    irregular_loops_flag: int = 0
    global_write_flag: int = 0
    num_if_statements: int = 0
    non_static_loop_limits_flag: int = 0
    num_iteration_independent_loops: int = 0
    loop_schedule_flag: int = 0
    num_loop_invariant_vars: int = 0
    num_hoisted_var_modifications: int = 0
    num_non_1d_arrays: int = 0
    num_aux_index_vars: int = 0
    total_for_loops: int = 0
    num_non_normalized_loops: int = 0

    @classmethod
    def from_list(cls, values) -> "FeatureVector":
        values = [int(v) for v in values]
        if len(values) != len(cls._fields):
            raise ValueError(f"a feature vector has {len(cls._fields)} components, got {len(values)}")
        return cls(*values)

    def invariant_violations(self) -> List[str]:
        problems = []
        if any(v < 0 for v in self):
            problems.append("negative component")
        for name in ("irregular_loops_flag", "global_write_flag", "non_static_loop_limits_flag", "loop_schedule_flag"):
            if getattr(self, name) not in (0, 1):
                problems.append(f"{name} is not a flag")
        for name in ("max_nested_loop_depth", "num_non_normalized_loops", "num_iteration_independent_loops"):
            if getattr(self, name) > self.total_for_loops:
                problems.append(f"{name} exceeds total_for_loops")
        return problems


FEATURE_NAMES: Tuple[str, ...] = FeatureVector._fields


def state_key(fv) -> StateKey:
    """Canonical comma-joined decimal serialization (injective)."""
    return ",".join(str(int(v)) for v in fv)


def parse_state_key(key: StateKey) -> FeatureVector:
    return FeatureVector.from_list(key.split(","))


@dataclass
class _Loop:
    path: Path
    node: For
    start: int
    end: int
    body_start: int
    var: Path  # decl path of the loop variable
    enclosing: List["_Loop"] = field(default_factory=list)


@dataclass
class _Facts:
    bindings: Bindings
    loops: List[_Loop] = field(default_factory=list)
    writes: List[Tuple[int, Path]] = field(default_factory=list)  # (pre-order index, decl path)
    reads: List[Tuple[int, Path]] = field(default_factory=list)
    accesses: List[Tuple[int, Path, ArrayAccess]] = field(default_factory=list)
    calls: int = 0
    ifs: int = 0
    jumps: int = 0


def _collect(unit: TranslationUnit) -> _Facts:
    bindings = resolve(unit)
    facts = _Facts(bindings)
    order = list(walk(unit))
    index = {path: i for i, (path, _) in enumerate(order)}
    span_end: Dict[Path, int] = {}
    # subtree end = index of the first following node that is not a descendant
    stack: List[Path] = []
    for i, (path, _) in enumerate(order):
        while stack and stack[-1] != path[: len(stack[-1])]:
            span_end[stack.pop()] = i
        stack.append(path)
    for p in stack:
        span_end[p] = len(order)

    lhs_paths = set()
    for i, (path, node) in enumerate(order):
        if isinstance(node, For):
            body = path + (3,)
            facts.loops.append(
                _Loop(path, node, i, span_end[path], index[body], bindings.refs[path + (0, 0)])
            )
        elif isinstance(node, Assign):
            lhs_paths.add(path + (0,))
            facts.writes.append((i, bindings.refs[path + (0,)]))
        elif isinstance(node, Decl) and node.var.init is not None:
            facts.writes.append((i, path + (0,)))
        elif isinstance(node, (Var, ArrayAccess)) and path in bindings.refs:
            if isinstance(node, ArrayAccess):
                facts.accesses.append((i, path, node))
            if path not in lhs_paths:
                facts.reads.append((i, bindings.refs[path]))
        elif isinstance(node, Call):
            facts.calls += 1
        elif isinstance(node, If):
            facts.ifs += 1
        elif isinstance(node, (Break, Continue)):
            facts.jumps += 1
    for loop in facts.loops:
        loop.enclosing = [o for o in facts.loops if o is not loop and o.start < loop.start < o.end]
    return facts


def _enclosing(facts: _Facts, i: int) -> List[_Loop]:
    return [lp for lp in facts.loops if lp.start < i < lp.end]


def _is_positive_offset(index, loop_var: Path, index_path: Path, bindings: Bindings) -> bool:
    if not isinstance(index, BinOp) or index.op != "+":
        return False
    for var_side, lit_side in ((0, 1), (1, 0)):
        var = (index.lhs, index.rhs)[var_side]
        lit = (index.lhs, index.rhs)[lit_side]
        if (
            isinstance(var, Var)
            and isinstance(lit, IntLit)
            and lit.value > 0
            and bindings.refs.get(index_path + (var_side,)) == loop_var
        ):
            return True
    return False


def _shifted_write_loop(loop: _Loop, bindings: Bindings) -> bool:
    """Two or more writes to one array per iteration, one at loop-var + k (k > 0)."""
    groups: Dict[Path, List[Tuple[Path, ArrayAccess]]] = {}

    def visit(node, path):
        if isinstance(node, For):
            return  # writes of a nested loop happen per inner iteration
        if isinstance(node, Assign) and isinstance(node.lhs, ArrayAccess):
            decl = bindings.refs[path + (0,)]
            groups.setdefault(decl, []).append((path + (0,), node.lhs))
        for k, child in enumerate(children(node)):
            visit(child, path + (k,))

    visit(loop.node.body, loop.path + (3,))
    for writes in groups.values():
        if len(writes) < 2:
            continue
        for acc_path, acc in writes:
            if any(
                _is_positive_offset(idx, loop.var, acc_path + (k,), bindings)
                for k, idx in enumerate(acc.indices)
            ):
                return True
    return False


def _is_unit_step(loop: For) -> bool:
    step = loop.step
    return step.rhs == BinOp("+", step.lhs, IntLit(1))


def extract(unit: TranslationUnit) -> FeatureVector:
    """Compute the fifteen-feature abstraction of a whole translation unit."""
    facts = _collect(unit)
    b = facts.bindings
    loops = facts.loops

    depth = max((len(lp.enclosing) for lp in loops), default=0)

    global_write = any(b.decls[d].scope == "global" for _, d in facts.writes)

    non_static = False
    for lp in loops:
        cond_path = lp.path + (1,)
        cond_nodes = [(p, n) for p, n in walk(lp.node.cond, cond_path)]
        if any(isinstance(n, Call) for _, n in cond_nodes):
            non_static = True
            break
        cond_vars = {b.refs[p] for p, n in cond_nodes if isinstance(n, (Var, ArrayAccess)) and p in b.refs}
        cond_vars.discard(lp.var)
        bodies = [(lp.body_start, lp.end)] + [(o.body_start, o.end) for o in lp.enclosing]
        if any(d in cond_vars and any(s <= i < e for s, e in bodies) for i, d in facts.writes):
            non_static = True
            break

    invariant = hoisted = 0
    for lp in loops:
        before = {d for i, d in facts.writes if i < lp.start}
        written_in = {d for i, d in facts.writes if lp.start <= i < lp.end}
        read_in = {d for i, d in facts.reads if lp.start <= i < lp.end}
        candidates = before - {lp.var}
        invariant += len((candidates & read_in) - written_in)
        hoisted += len(candidates & written_in)

    aux: Set[Path] = set()
    for i, path, acc in facts.accesses:
        around = _enclosing(facts, i)
        if not around:
            continue
        loop_vars = {lp.var for lp in around}
        for k in range(len(acc.indices)):
            for p, n in walk(acc.indices[k], path + (k,)):
                if not isinstance(n, Var):
                    continue
                d = b.refs[p]
                decl: VarDecl = b.decls[d]
                if decl.const or decl.is_array or d in loop_vars:
                    continue
                if any(wd == d and lp.start <= wi < lp.end for wi, wd in facts.writes for lp in around):
                    aux.add(d)

    pragmas = [p for lp in loops for p in lp.node.pragmas]

    return FeatureVector(
        max_nested_loop_depth=depth,
        num_function_calls=facts.calls,
        num_shifted_array_writes=sum(_shifted_write_loop(lp, b) for lp in loops),
        irregular_loops_flag=int(facts.jumps > 0),
        global_write_flag=int(global_write),
        num_if_statements=facts.ifs,
        non_static_loop_limits_flag=int(non_static),
        num_iteration_independent_loops=sum(
            any(p.kind == "iteration_independent" for p in lp.node.pragmas) for lp in loops
        ),
        loop_schedule_flag=int(any(p.kind == "loop_schedule" for p in pragmas)),
        num_loop_invariant_vars=invariant,
        num_hoisted_var_modifications=hoisted,
        num_non_1d_arrays=sum(len(d.dims) >= 2 for d in b.decls.values()),
        num_aux_index_vars=len(aux),
        total_for_loops=len(loops),
        num_non_normalized_loops=sum(not _is_unit_step(lp.node) for lp in loops),
    )
