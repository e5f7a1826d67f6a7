"""Tabular state-action learning over transformation graphs, and greedy rule selection.

Random-number protocol (kept stable so independent re-implementations can
replay a run): one ``random.Random(seed)`` drives everything. Each episode
draws its start state with ``rng.randrange(len(starts))`` over the non-final
states in graph order. ``select_action`` consumes ``rng.randrange`` only when
two or more actions tie for the maximum; ε-greedy, when enabled, draws
``rng.random()`` before every selection.
"""

from __future__ import annotations

import json
import logging
import random
import time
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .abstraction import FeatureVector, StateKey, extract, state_key
from .classify import DecisionTree, Platform, is_final
from .codemodel.ast import TranslationUnit
from .errors import BadStart, FinalStateUpdate, GraphError, NoActions, RewriteRLError
from .rules import RuleId, RuleRegistry, Site, apply_rule, default_registry, find_sites

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
BEST_REWARD = 100.0
OTHER_REWARD = 1.0

Step = Tuple[StateKey, RuleId, float, StateKey]


@dataclass
class LearnConfig:
    alpha: float = 0.5
    gamma: float = 0.6
    q_init: float = 1.0
    episodes: int = 500
    max_steps: int = 50
    seed: int = 0
    epsilon: float = 0.0

    def validate(self) -> "LearnConfig":
        if not 0 < self.alpha <= 1:
            raise RewriteRLError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 < self.gamma <= 1:
            raise RewriteRLError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.gamma >= 1:
            warnings.warn("gamma >= 1: state-action values may diverge", RuntimeWarning, stacklevel=2)
        if self.episodes < 0 or self.max_steps < 1:
            raise RewriteRLError("episodes must be >= 0 and max_steps >= 1")
        if not 0 <= self.epsilon <= 1:
            raise RewriteRLError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not -(2**63) <= self.seed < 2**64:
            raise RewriteRLError("seed must fit in 64 bits")
        return self


class QTable:
    """Sparse state-action table; absent entries read as ``q_init``."""

    def __init__(
        self,
        q_init: float = 1.0,
        states: Iterable[StateKey] = (),
        actions: Iterable[RuleId] = (),
        final_states: Iterable[StateKey] = (),
    ):
        self.q_init = float(q_init)
        self.entries: Dict[Tuple[StateKey, RuleId], float] = {}
        self.known_states: List[StateKey] = []
        self.known_actions: List[RuleId] = sorted(set(actions))
        self.final_states = set(final_states)
        for s in states:
            self.add_state(s)

    def add_state(self, s: StateKey):
        if s not in self.known_states:
            self.known_states.append(s)

    def get(self, s: StateKey, a: RuleId) -> float:
        return self.entries.get((s, a), self.q_init)

    def set(self, s: StateKey, a: RuleId, value: float):
        if s in self.final_states:
            raise FinalStateUpdate(f"row of final state {s} is frozen")
        self.add_state(s)
        if a not in self.known_actions:
            self.known_actions = sorted(self.known_actions + [a])
        self.entries[(s, a)] = value

    def row(self, s: StateKey, actions: Optional[Iterable[RuleId]] = None) -> Dict[RuleId, float]:
        acts = self.known_actions if actions is None else actions
        return {a: self.get(s, a) for a in acts}

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "q_init": self.q_init,
            "actions": list(self.known_actions),
            "finals": [s for s in self.known_states if s in self.final_states],
            "rows": {s: {str(a): self.get(s, a) for a in self.known_actions} for s in self.known_states},
        }

    def dumps(self) -> str:
        """JSON text with every value written to 17 significant digits."""
        lines = [
            "{",
            f'  "schema": {SCHEMA_VERSION},',
            f'  "q_init": {_num(self.q_init)},',
            f'  "actions": {json.dumps(self.known_actions)},',
            f'  "finals": {json.dumps([s for s in self.known_states if s in self.final_states])},',
            '  "rows": {',
        ]
        for n, s in enumerate(self.known_states):
            cells = ", ".join(f'"{a}": {_num(self.get(s, a))}' for a in self.known_actions)
            comma = "," if n + 1 < len(self.known_states) else ""
            lines.append(f"    {json.dumps(s)}: {{{cells}}}{comma}")
        lines += ["  }", "}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "QTable":
        try:
            rows = data["rows"]
            q = cls(float(data["q_init"]), actions=data.get("actions", ()), final_states=data.get("finals", ()))
            for s, row in rows.items():
                q.add_state(s)
                for a, v in row.items():
                    a = int(a)
                    if a not in q.known_actions:
                        q.known_actions = sorted(q.known_actions + [a])
                    if s not in q.final_states:
                        q.entries[(s, a)] = float(v)
            return q
        except (KeyError, TypeError, ValueError) as exc:
            raise RewriteRLError(f"malformed Q-table: {exc}") from None

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "QTable":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _num(v: float) -> str:
    text = format(float(v), ".17g")
    if text in ("inf", "-inf", "nan"):
        raise RewriteRLError(f"non-finite Q value {text}")
    return text


@dataclass
class TrainingGraph:
    states: List[StateKey] = field(default_factory=list)
    transitions: Dict[Tuple[StateKey, RuleId], StateKey] = field(default_factory=dict)
    rewards: Dict[StateKey, float] = field(default_factory=dict)  # final states only

    @property
    def final_states(self) -> set:
        return set(self.rewards)

    def is_final(self, s: StateKey) -> bool:
        return s in self.rewards

    def actions(self, s: StateKey) -> List[RuleId]:
        return sorted(a for (src, a) in self.transitions if src == s)

    def add_state(self, s: StateKey):
        if s not in self.states:
            self.states.append(s)

    def add_transition(self, s: StateKey, a: RuleId, s2: StateKey):
        prev = self.transitions.get((s, a))
        if prev is not None and prev != s2:
            raise GraphError(f"transition ({s}, {a}) leads to both {prev} and {s2}")
        self.add_state(s)
        self.add_state(s2)
        self.transitions[(s, a)] = s2

    def validate(self) -> "TrainingGraph":
        known = set(self.states)
        for (s, a), s2 in self.transitions.items():
            if s not in known or s2 not in known:
                raise GraphError(f"transition ({s}, {a}) -> {s2} mentions an unknown state")
        for s in self.rewards:
            if s not in known:
                raise GraphError(f"final state {s} is not among the states")
        for s in self.states:
            if not self.is_final(s) and not self.actions(s):
                raise GraphError(f"non-final state {s} has no outgoing transition")
        return self

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "states": list(self.states),
            "transitions": [
                {"s": s, "a": a, "s'": s2} for (s, a), s2 in sorted(self.transitions.items(), key=_tkey(self))
            ],
            "finals": [{"state": s, "reward": r} for s, r in self.rewards.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingGraph":
        g = cls()
        try:
            for s in data.get("states", []):
                g.add_state(s)
            for t in data["transitions"]:
                g.add_transition(t["s"], int(t["a"]), t["s'"])
            for f in data["finals"]:
                g.add_state(f["state"])
                g.rewards[f["state"]] = float(f["reward"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed training graph: {exc}") from None
        return g.validate()

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TrainingGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _tkey(g: TrainingGraph):
    order = {s: i for i, s in enumerate(g.states)}
    return lambda item: (order[item[0][0]], item[0][1])


def select_action(
    q: QTable, s: StateKey, available: Sequence[RuleId], rng: random.Random, epsilon: float = 0.0
) -> RuleId:
    """Greedy choice over ``available``; ties are broken uniformly with ``rng``."""
    available = sorted(available)
    if not available:
        raise NoActions(f"no actions available in state {s}")
    if epsilon > 0 and rng.random() < epsilon:
        return available[rng.randrange(len(available))]
    values = [q.get(s, a) for a in available]
    best = max(values)
    tied = [a for a, v in zip(available, values) if v == best]
    if len(tied) == 1:
        return tied[0]
    return tied[rng.randrange(len(tied))]


def sarsa_update(
    q: QTable,
    s: StateKey,
    a: RuleId,
    r_next: float,
    s_next: StateKey,
    a_next: Optional[RuleId],
    cfg: LearnConfig,
) -> float:
    """One temporal-difference update of ``q(s, a)``; returns the new value.

    ``a_next=None`` means "the best action at ``s_next``" (its row maximum).
    """
    if s in q.final_states:
        raise FinalStateUpdate(f"refusing to update final state {s}")
    if a_next is None:
        row = q.row(s_next)
        future = max(row.values()) if row else q.q_init
    else:
        future = q.get(s_next, a_next)
    old = q.get(s, a)
    new = old + cfg.alpha * (r_next + cfg.gamma * future - old)
    q.set(s, a, new)
    return new


def run_episode(
    q: QTable, graph: TrainingGraph, start: StateKey, cfg: LearnConfig, rng: random.Random
) -> List[Step]:
    """Greedy walk from ``start``, then updates in reverse temporal order."""
    if start not in graph.states or graph.is_final(start):
        raise BadStart(f"episode start {start!r} is not a non-final graph state")
    steps: List[Step] = []
    s = start
    while len(steps) < cfg.max_steps:
        a = select_action(q, s, graph.actions(s), rng, cfg.epsilon)
        s2 = graph.transitions[(s, a)]
        r = graph.rewards.get(s2, 0.0)
        steps.append((s, a, r, s2))
        s = s2
        if graph.is_final(s):
            break
    for t in range(len(steps) - 1, -1, -1):
        s, a, r, s2 = steps[t]
        if t + 1 < len(steps):
            a_next: Optional[RuleId] = steps[t + 1][1]
            sarsa_update(q, s, a, r, s2, a_next, cfg)
        elif graph.is_final(s2):
            sarsa_update(q, s, a, r, s2, None, cfg)
        else:
            # budget ran out before acting at s2: use its best available action
            best = max(graph.actions(s2), key=lambda b: (q.get(s2, b), -b))
            sarsa_update(q, s, a, r, s2, best, cfg)
    return steps


def new_table(graph: TrainingGraph, q_init: float) -> QTable:
    actions = sorted({a for (_, a) in graph.transitions})
    return QTable(q_init, graph.states, actions, graph.final_states)


def train(graph: TrainingGraph, cfg: LearnConfig) -> QTable:
    """Run ``cfg.episodes`` episodes from uniformly drawn non-final states."""
    graph.validate()
    cfg.validate()
    q = new_table(graph, cfg.q_init)
    starts = [s for s in graph.states if not graph.is_final(s)]
    if not starts:
        raise GraphError("training graph has no non-final state to start from")
    rng = random.Random(cfg.seed)
    for ep in range(cfg.episodes):
        start = starts[rng.randrange(len(starts))]
        steps = run_episode(q, graph, start, cfg, rng)
        log.debug("episode %d from %s: %d steps", ep, start, len(steps))
    return q


def greedy_policy(q: QTable, graph: TrainingGraph, start: StateKey, max_steps: int = 50) -> List[RuleId]:
    """Replay the learned policy through the graph (ties resolved by lowest id)."""
    out, s = [], start
    while not graph.is_final(s) and len(out) < max_steps:
        acts = graph.actions(s)
        a = max(acts, key=lambda b: (q.get(s, b), -b))
        out.append(a)
        s = graph.transitions[(s, a)]
    return out


def graph_from_sequence(
    unit: TranslationUnit,
    sequence: Sequence[RuleId],
    reward: float = BEST_REWARD,
    graph: Optional[TrainingGraph] = None,
    rules: Optional[RuleRegistry] = None,
) -> TrainingGraph:
    """Record a transformation sequence (leftmost-outermost sites) as graph transitions.

    The state reached after the last rule becomes final with ``reward``.
    """
    graph = graph if graph is not None else TrainingGraph()
    s = state_key(extract(unit))
    graph.add_state(s)
    for rid in sequence:
        sites = find_sites(unit, rid, rules)
        if not sites:
            raise GraphError(f"rule {rid} has no site at state {s}")
        unit = apply_rule(unit, rid, sites[0], rules).unit
        s2 = state_key(extract(unit))
        graph.add_transition(s, rid, s2)
        s = s2
    graph.rewards[s] = float(reward)
    return graph


@dataclass
class TransformStep:
    rule: RuleId
    site: Site
    features: FeatureVector
    state: StateKey


@dataclass
class TransformResult:
    unit: TranslationUnit
    steps: List[TransformStep]
    terminal: str  # final | budget_exhausted | no_applicable_rule
    initial_features: FeatureVector
    elapsed: float = 0.0

    @property
    def sequence(self) -> List[Tuple[RuleId, Site]]:
        return [(st.rule, st.site) for st in self.steps]


def transform_greedy(
    unit: TranslationUnit,
    q: QTable,
    rules: Optional[RuleRegistry],
    tree: DecisionTree,
    target: Platform,
    max_steps: int = 50,
    rng: Optional[random.Random] = None,
) -> TransformResult:
    """Apply the highest-valued applicable rule until the code is ready for ``target``."""
    rules = rules or default_registry()
    rng = rng or random.Random(0)
    t0 = time.perf_counter()
    fv = extract(unit)
    first = fv
    steps: List[TransformStep] = []
    terminal = "budget_exhausted"
    while True:
        if is_final(tree, fv, target):
            terminal = "final"
            break
        if len(steps) >= max_steps:
            break
        sites = {r.id: find_sites(unit, r.id, rules) for r in rules}
        available = [rid for rid, ss in sites.items() if ss]
        if not available:
            terminal = "no_applicable_rule"
            break
        s = state_key(fv)
        rid = select_action(q, s, available, rng)
        site = sites[rid][0]
        unit = apply_rule(unit, rid, site, rules).unit
        fv = extract(unit)
        steps.append(TransformStep(rid, site, fv, state_key(fv)))
        log.info("applied rule %d at %s -> %s", rid, site, steps[-1].state)
    return TransformResult(unit, steps, terminal, first, time.perf_counter() - t0)
