"""Immutable AST for the C subset.

Every node is a frozen dataclass, so structural equality is plain ``==`` and
nodes can be shared freely between trees. Child nodes are the dataclass fields
holding a node or a tuple of nodes, in field order; a path is the sequence of
indices into those flattened child lists, starting from the TranslationUnit.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

Path = Tuple[int, ...]

BINARY_OPS = ("+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=")
PRAGMA_KINDS = ("loop_schedule", "iteration_independent")


class Node:
    """Marker base class for AST nodes."""


@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class ArrayAccess(Node):
    base: str
    indices: Tuple["Expr", ...]


@dataclass(frozen=True)
class Call(Node):
    """Function call; used both as an expression and as a statement."""

    name: str
    args: Tuple["Expr", ...] = ()


Expr = Union[IntLit, Var, BinOp, ArrayAccess, Call]
LValue = Union[Var, ArrayAccess]


@dataclass(frozen=True)
class VarDecl(Node):
    name: str
    dims: Tuple[Expr, ...] = ()
    scope: str = "local"  # global | param | local
    const: bool = False
    init: Optional[Expr] = None

    @property
    def is_array(self) -> bool:
        return bool(self.dims)


@dataclass(frozen=True)
class Pragma(Node):
    kind: str
    raw: str = ""

    def __post_init__(self):
        if not self.raw:
            object.__setattr__(self, "raw", f"#pragma stml {self.kind}")


@dataclass(frozen=True)
class Assign(Node):
    lhs: LValue
    rhs: Expr


@dataclass(frozen=True)
class Block(Node):
    stmts: Tuple["Stmt", ...] = ()


@dataclass(frozen=True)
class For(Node):
    init: Assign
    cond: Expr
    step: Assign
    body: "Stmt"
    pragmas: Tuple[Pragma, ...] = ()

    @property
    def var(self) -> str:
        return self.init.lhs.name


@dataclass(frozen=True)
class If(Node):
    cond: Expr
    then: "Stmt"
    else_: Optional["Stmt"] = None


@dataclass(frozen=True)
class Break(Node):
    pass


@dataclass(frozen=True)
class Continue(Node):
    pass


@dataclass(frozen=True)
class Decl(Node):
    var: VarDecl


Stmt = Union[Block, For, If, Assign, Call, Break, Continue, Decl]


@dataclass(frozen=True)
class FunctionDef(Node):
    name: str
    params: Tuple[VarDecl, ...]
    body: Block


@dataclass(frozen=True)
class TranslationUnit(Node):
    globals: Tuple[VarDecl, ...] = ()
    functions: Tuple[FunctionDef, ...] = ()

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)


def children(node: Node) -> list:
    out = []
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Node):
            out.append(value)
        elif isinstance(value, tuple):
            out.extend(v for v in value if isinstance(v, Node))
    return out


def replace_child(node: Node, index: int, new: Node) -> Node:
    """Return a copy of ``node`` with its ``index``-th child replaced."""
    seen = 0
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Node):
            if seen == index:
                return dataclasses.replace(node, **{f.name: new})
            seen += 1
        elif isinstance(value, tuple):
            members = [v for v in value if isinstance(v, Node)]
            if seen + len(members) > index:
                items = list(value)
                items[index - seen] = new
                return dataclasses.replace(node, **{f.name: tuple(items)})
            seen += len(members)
    raise IndexError(f"{type(node).__name__} has no child {index}")


def walk(node: Node, path: Path = ()) -> Iterator[Tuple[Path, Node]]:
    """Pre-order (document order) traversal yielding ``(path, node)``."""
    yield path, node
    for i, child in enumerate(children(node)):
        yield from walk(child, path + (i,))


def node_at(root: Node, path: Path) -> Node:
    node = root
    for i in path:
        kids = children(node)
        if i >= len(kids):
            raise IndexError(f"path {path} does not resolve")
        node = kids[i]
    return node


def replace_at(root: Node, path: Path, new: Node) -> Node:
    if not path:
        return new
    parent = node_at(root, path[:-1])
    return replace_at(root, path[:-1], replace_child(parent, path[-1], new))


def is_prefix(prefix: Path, path: Path) -> bool:
    return path[: len(prefix)] == prefix


def mentioned_names(node: Node) -> set:
    """Every variable name read or written anywhere under ``node``."""
    names = set()
    for _, n in walk(node):
        if isinstance(n, Var):
            names.add(n.name)
        elif isinstance(n, ArrayAccess):
            names.add(n.base)
    return names
