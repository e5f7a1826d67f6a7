"""Platform-readiness classification tree (CART with Gini impurity).

Candidate thresholds are midpoints between consecutive distinct observed
values of a feature; ``x[f] <= t`` routes left. Impurities are compared as
exact fractions so tie-breaking (lowest feature, then lowest threshold) never
depends on float rounding.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .abstraction import FeatureVector
from .errors import AmbiguousData, EmptyInput, RewriteRLError

N_FEATURES = len(FeatureVector._fields)
SCHEMA_VERSION = 1


class Platform(enum.Enum):
    FPGA = "FPGA"
    GPU = "GPU"
    SM_CPU = "SM_CPU"
    DM_CPU = "DM_CPU"

    @classmethod
    def parse(cls, text: str) -> "Platform":
        key = text.strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            names = ", ".join(p.value for p in cls)
            raise RewriteRLError(f"unknown platform {text!r} (expected one of {names})") from None


_ORDER = {p: i for i, p in enumerate(Platform)}

PlatformSet = FrozenSet[Platform]


def class_sort_key(cls: PlatformSet) -> Tuple[int, Tuple[int, ...]]:
    return len(cls), tuple(sorted(_ORDER[p] for p in cls))


def platform_classes() -> List[PlatformSet]:
    """The 15 non-empty platform subsets, by size then lexicographically."""
    members = list(Platform)
    return [frozenset(c) for m in range(1, len(members) + 1) for c in combinations(members, m)]


def make_class(names: Iterable[Union[str, Platform]]) -> PlatformSet:
    cls = frozenset(p if isinstance(p, Platform) else Platform.parse(p) for p in names)
    if not cls:
        raise RewriteRLError("a platform class must name at least one platform")
    return cls


def class_names(cls: PlatformSet) -> List[str]:
    return [p.value for p in sorted(cls, key=_ORDER.__getitem__)]


@dataclass(frozen=True)
class LabeledSample:
    x: Tuple[int, ...]
    y: PlatformSet

    def __post_init__(self):
        if len(self.x) != N_FEATURES:
            raise RewriteRLError(f"sample has {len(self.x)} features, expected {N_FEATURES}")


@dataclass
class Leaf:
    cls: PlatformSet
    counts: Dict[PlatformSet, int]


@dataclass
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass
class DecisionTree:
    root: TreeNode
    params: Dict[str, Optional[int]] = field(default_factory=dict)

    def predict(self, x: Sequence[int]) -> PlatformSet:
        return predict(self, x)

    def leaf_for(self, x: Sequence[int]) -> Tuple[Leaf, List[int]]:
        node, tested = self.root, []
        while isinstance(node, Split):
            tested.append(node.feature)
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node, tested


def gini(counts: Iterable[int]) -> Fraction:
    counts = list(counts)
    n = sum(counts)
    if n == 0:
        return Fraction(0)
    return 1 - sum(Fraction(c * c, n * n) for c in counts)


def _counts(samples: Sequence[LabeledSample]) -> Dict[PlatformSet, int]:
    out: Dict[PlatformSet, int] = {}
    for s in samples:
        out[s.y] = out.get(s.y, 0) + 1
    return out


def candidate_thresholds(values: Iterable[int]) -> List[float]:
    distinct = sorted(set(values))
    return [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]


def split_gain(samples: Sequence[LabeledSample], feature: int, threshold: float) -> Fraction:
    """Parent impurity minus the size-weighted impurity of the two children."""
    left = [s for s in samples if s.x[feature] <= threshold]
    right = [s for s in samples if s.x[feature] > threshold]
    n = len(samples)
    child = Fraction(len(left), n) * gini(_counts(left).values()) + Fraction(len(right), n) * gini(
        _counts(right).values()
    )
    return gini(_counts(samples).values()) - child


def best_split(samples: Sequence[LabeledSample]) -> Optional[Tuple[int, float, Fraction]]:
    best = None
    for f in range(N_FEATURES):
        for t in candidate_thresholds(s.x[f] for s in samples):
            gain = split_gain(samples, f, t)
            if best is None or gain > best[2]:
                best = (f, t, gain)
    return best


def _majority(counts: Dict[PlatformSet, int]) -> PlatformSet:
    return min(counts, key=lambda c: (-counts[c], class_sort_key(c)))


def fit(
    samples: Sequence[LabeledSample],
    min_samples: int = 1,
    max_depth: Optional[int] = None,
    min_gain: float = 0.0,
) -> DecisionTree:
    """Grow a tree by recursive binary partitioning.

    A node becomes a leaf when it is pure, holds fewer than ``min_samples``
    samples (or fewer than two), sits at ``max_depth``, has no candidate split,
    or its best split gains less than ``min_gain``. With the default
    ``min_gain=0`` zero-gain splits are still taken, which is what lets a
    tree memorize XOR-like patterns.
    """
    samples = list(samples)
    if not samples:
        raise EmptyInput("cannot fit a tree on zero samples")
    seen: Dict[Tuple[int, ...], PlatformSet] = {}
    for s in samples:
        if seen.setdefault(tuple(s.x), s.y) != s.y:
            raise AmbiguousData(f"feature vector {list(s.x)} appears with different classes")

    def grow(subset: List[LabeledSample], depth: int) -> TreeNode:
        counts = _counts(subset)
        leaf = Leaf(_majority(counts), counts)
        if len(counts) == 1 or len(subset) < max(2, min_samples):
            return leaf
        if max_depth is not None and depth >= max_depth:
            return leaf
        found = best_split(subset)
        if found is None or found[2] < min_gain:
            return leaf
        f, t, _ = found
        left = [s for s in subset if s.x[f] <= t]
        right = [s for s in subset if s.x[f] > t]
        return Split(f, t, grow(left, depth + 1), grow(right, depth + 1))

    params = {"min_samples": min_samples, "max_depth": max_depth}
    return DecisionTree(grow(samples, 0), params)


def predict(tree: DecisionTree, x: Sequence[int]) -> PlatformSet:
    return tree.leaf_for(x)[0].cls


def is_final(tree: DecisionTree, x: Sequence[int], target: Platform) -> bool:
    """True when ``target`` is among the platforms ``x`` is classified ready for."""
    return target in predict(tree, x)


def accuracy(tree: DecisionTree, samples: Sequence[LabeledSample]) -> float:
    return sum(predict(tree, s.x) == s.y for s in samples) / len(samples)


# serialization


def load_corpus(path) -> List[LabeledSample]:
    with open(path) as fh:
        records = json.load(fh)
    if isinstance(records, dict):
        records = records.get("samples", [])
    out = []
    for i, rec in enumerate(records):
        try:
            out.append(LabeledSample(tuple(int(v) for v in rec["features"]), make_class(rec["classes"])))
        except (KeyError, TypeError) as exc:
            raise RewriteRLError(f"corpus record {i} is malformed: {exc}") from None
    return out


def tree_to_dict(tree: DecisionTree) -> dict:
    nodes: List[dict] = []

    def emit(node: TreeNode) -> int:
        idx = len(nodes)
        nodes.append({})
        if isinstance(node, Leaf):
            nodes[idx] = {
                "id": idx,
                "kind": "leaf",
                "class": class_names(node.cls),
                "counts": [
                    {"class": class_names(c), "count": node.counts[c]}
                    for c in sorted(node.counts, key=class_sort_key)
                ],
            }
        else:
            left = emit(node.left)
            right = emit(node.right)
            nodes[idx] = {
                "id": idx,
                "kind": "split",
                "feature": node.feature,
                "threshold": node.threshold,
                "left": left,
                "right": right,
            }
        return idx

    emit(tree.root)
    return {"schema": SCHEMA_VERSION, "root": 0, "params": tree.params, "nodes": nodes}


def tree_from_dict(data: dict) -> DecisionTree:
    try:
        records = {rec["id"]: rec for rec in data["nodes"]}

        def build(idx: int) -> TreeNode:
            rec = records[idx]
            if rec["kind"] == "leaf":
                counts = {make_class(c["class"]): int(c["count"]) for c in rec.get("counts", [])}
                return Leaf(make_class(rec["class"]), counts)
            feature = int(rec["feature"])
            if not 0 <= feature < N_FEATURES:
                raise RewriteRLError(f"tree node {idx} tests feature {feature}")
            return Split(feature, float(rec["threshold"]), build(rec["left"]), build(rec["right"]))

        return DecisionTree(build(data.get("root", 0)), dict(data.get("params", {})))
    except (KeyError, TypeError) as exc:
        raise RewriteRLError(f"malformed tree file: missing {exc}") from None


def save_tree(tree: DecisionTree, path) -> None:
    with open(path, "w") as fh:
        json.dump(tree_to_dict(tree), fh, indent=2)
        fh.write("\n")


def load_tree(path) -> DecisionTree:
    with open(path) as fh:
        return tree_from_dict(json.load(fh))
