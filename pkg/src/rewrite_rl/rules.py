"""Rewrite-rule registry and the two shipped rules.

A site is the path (tuple of child indices, see ``codemodel.ast``) of the node
a rule matches: the array ``VarDecl`` for ``flatten_array`` and the outer
``For`` of the nest for ``collapse_loops``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Callable, Dict, Iterable, List, Optional

from .codemodel.ast import (
    ArrayAccess,
    Assign,
    BinOp,
    Block,
    Break,
    Continue,
    Decl,
    For,
    IntLit,
    Node,
    Path,
    TranslationUnit,
    Var,
    VarDecl,
    is_prefix,
    mentioned_names,
    node_at,
    replace_at,
    walk,
)
from .codemodel.semantics import Bindings, check_unit, resolve
from .errors import RegistrationError, SiteMismatch, UnknownRule

RuleId = int
Site = Path


@dataclass(frozen=True)
class Rule:
    id: RuleId
    name: str
    matcher: Callable[[TranslationUnit, Site], bool]
    rewriter: Callable[[TranslationUnit, Site], TranslationUnit]
    node_type: type = Node  # cheap pre-filter for find_sites


@dataclass(frozen=True)
class RewriteResult:
    unit: TranslationUnit
    rule: RuleId
    site: Site


@lru_cache(maxsize=128)
def _bindings(unit: TranslationUnit) -> Bindings:
    return resolve(unit)


def _node(unit: TranslationUnit, site: Site) -> Optional[Node]:
    try:
        return node_at(unit, site)
    except (IndexError, TypeError):
        return None


# R0: array flattening


def _refs_to(bindings: Bindings, decl_path: Path) -> List[Path]:
    return [ref for ref, target in bindings.refs.items() if target == decl_path]


def match_flatten(unit: TranslationUnit, site: Site) -> bool:
    decl = _node(unit, site)
    if not isinstance(decl, VarDecl) or len(decl.dims) < 2:
        return False
    b = _bindings(unit)
    if site not in b.decls:
        return False
    if any(b.const_value(d) is None for d in decl.dims):
        return False
    # every use must be a fully indexed access; a bare name means the whole
    # array escapes into a call
    return all(isinstance(node_at(unit, ref), ArrayAccess) for ref in _refs_to(b, site))


def linearize(indices, extents: List[int]):
    """Row-major offset expression ``e1*s1 + e2*s2 + ... + ed``."""
    total = None
    for k, idx in enumerate(indices):
        stride = prod(extents[k + 1 :])
        term = idx if stride == 1 else BinOp("*", idx, IntLit(stride))
        total = term if total is None else BinOp("+", total, term)
    return total


def rewrite_flatten(unit: TranslationUnit, site: Site) -> TranslationUnit:
    b = _bindings(unit)
    decl: VarDecl = node_at(unit, site)
    extents = [b.const_value(d) for d in decl.dims]
    refs = sorted(_refs_to(b, site), key=len, reverse=True)  # inner accesses first
    for ref in refs:
        acc: ArrayAccess = node_at(unit, ref)
        unit = replace_at(unit, ref, ArrayAccess(acc.base, (linearize(acc.indices, extents),)))
    flat = VarDecl(decl.name, (IntLit(prod(extents)),), decl.scope, decl.const, decl.init)
    return replace_at(unit, site, flat)


# R1: loop collapse


def _static_limit(loop: For, b: Bindings) -> Optional[int]:
    cond = loop.cond
    if not (isinstance(cond, BinOp) and cond.op == "<" and cond.lhs == loop.init.lhs):
        return None
    return b.const_value(cond.rhs)


def _normalized(loop: For) -> bool:
    return loop.init.rhs == IntLit(0) and loop.step.rhs == BinOp("+", loop.init.lhs, IntLit(1))


def match_collapse(unit: TranslationUnit, site: Site) -> bool:
    outer = _node(unit, site)
    if not isinstance(outer, For) or not isinstance(outer.body, For):
        return False
    inner: For = outer.body
    if not (_normalized(outer) and _normalized(inner)):
        return False
    b = _bindings(unit)
    n = _static_limit(outer, b)
    m = _static_limit(inner, b)
    if n is None or m is None or n < 1 or m < 1:
        return False
    outer_var = b.refs[site + (0, 0)]
    inner_var = b.refs[site + (3, 0, 0)]
    if outer_var == inner_var:
        return False
    if any(b.decls[v].scope == "global" for v in (outer_var, inner_var)):
        return False
    body_path = site + (3, 3)
    for path, node in walk(inner.body, body_path):
        if isinstance(node, (Break, Continue)):
            return False
        if isinstance(node, Assign) and b.refs[path + (0,)] in (outer_var, inner_var):
            return False
    # the loop variables must not be touched outside the nest, or the
    # shadowing declarations of the collapsed form would change their values
    return not any(
        target in (outer_var, inner_var) and not is_prefix(site, ref) for ref, target in b.refs.items()
    )


def fresh_name(unit: TranslationUnit, stem: str = "__k") -> str:
    used = mentioned_names(unit) | {
        n.name for _, n in walk(unit) if isinstance(n, VarDecl)
    }
    n = 0
    while f"{stem}{n}" in used:
        n += 1
    return f"{stem}{n}"


def _product(a, b):
    if isinstance(a, IntLit) and isinstance(b, IntLit):
        return IntLit(a.value * b.value)
    return BinOp("*", a, b)


def rewrite_collapse(unit: TranslationUnit, site: Site) -> TranslationUnit:
    outer: For = node_at(unit, site)
    inner: For = outer.body
    k = Var(fresh_name(unit))
    i, j = outer.var, inner.var
    n_expr, m_expr = outer.cond.rhs, inner.cond.rhs
    header = (
        Decl(VarDecl(i, init=BinOp("/", k, m_expr))),
        Decl(VarDecl(j, init=BinOp("%", k, m_expr))),
    )
    body = inner.body
    clashes = isinstance(body, Block) and any(
        isinstance(s, Decl) and s.var.name in (i, j) for s in body.stmts
    )
    if isinstance(body, Block) and not clashes:
        new_body = Block(header + body.stmts)
    else:
        new_body = Block(header + (body,))
    collapsed = For(
        Assign(k, IntLit(0)),
        BinOp("<", k, _product(n_expr, m_expr)),
        Assign(k, BinOp("+", k, IntLit(1))),
        new_body,
        outer.pragmas,
    )
    counter = Decl(VarDecl(k.name))
    parent = node_at(unit, site[:-1])
    if isinstance(parent, Block):
        pos = site[-1]
        stmts = parent.stmts[:pos] + (counter, collapsed) + parent.stmts[pos + 1 :]
        return replace_at(unit, site[:-1], Block(stmts))
    return replace_at(unit, site, Block((counter, collapsed)))


FLATTEN_ARRAY = Rule(0, "flatten_array", match_flatten, rewrite_flatten, VarDecl)
COLLAPSE_LOOPS = Rule(1, "collapse_loops", match_collapse, rewrite_collapse, For)


class RuleRegistry:
    """Id-ordered collection of rules; ids must be unique."""

    def __init__(self, rules: Iterable[Rule] = ()):
        self._rules: Dict[RuleId, Rule] = {}
        for rule in rules:
            self.register(rule)

    def register(self, rule: Rule) -> Rule:
        if rule.id in self._rules:
            raise RegistrationError(f"rule id {rule.id} is already registered ({self._rules[rule.id].name})")
        self._rules[rule.id] = rule
        return rule

    def get(self, rule_id: RuleId) -> Rule:
        try:
            return self._rules[rule_id]
        except KeyError:
            raise UnknownRule(f"no rule with id {rule_id}") from None

    def __iter__(self):
        return iter(self.rules())

    def __len__(self):
        return len(self._rules)

    def rules(self) -> List[Rule]:
        return [self._rules[k] for k in sorted(self._rules)]

    def ids(self) -> List[RuleId]:
        return sorted(self._rules)


def default_registry() -> RuleRegistry:
    return RuleRegistry([FLATTEN_ARRAY, COLLAPSE_LOOPS])


_DEFAULT = default_registry()


def registry() -> List[Rule]:
    """The shipped rules in id order."""
    return _DEFAULT.rules()


def find_sites(unit: TranslationUnit, rule: RuleId, rules: Optional[RuleRegistry] = None) -> List[Site]:
    """All sites where ``rule`` matches, leftmost-outermost first."""
    r = (rules or _DEFAULT).get(rule)
    return [path for path, node in walk(unit) if isinstance(node, r.node_type) and r.matcher(unit, path)]


def apply_rule(
    unit: TranslationUnit, rule: RuleId, site: Site, rules: Optional[RuleRegistry] = None
) -> RewriteResult:
    r = (rules or _DEFAULT).get(rule)
    site = tuple(site)
    if not r.matcher(unit, site):
        raise SiteMismatch(f"rule {r.name} does not match at site {list(site)}")
    new = r.rewriter(unit, site)
    check_unit(new)
    return RewriteResult(new, rule, site)


_SITE_RE = re.compile(r"^\d+(\.\d+)*$")


def format_site(site: Site) -> str:
    return ".".join(str(i) for i in site)


def parse_site(text: str) -> Site:
    if not _SITE_RE.match(text):
        raise ValueError(f"bad site {text!r}; expected dot-separated indices like 3.1.0")
    return tuple(int(x) for x in text.split("."))
