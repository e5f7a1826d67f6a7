"""Learned heuristics for rule-based source-to-source transformation of a C subset."""

__version__ = "0.1.0"

from .abstraction import FeatureVector, extract, state_key
from .classify import Platform, fit, is_final, platform_classes, predict
from .codemodel import interpret, parse, print_unit
from .rlengine import LearnConfig, QTable, TrainingGraph, select_action, train, transform_greedy
from .rules import apply_rule, find_sites, registry

__all__ = [
    "FeatureVector", "extract", "state_key", "Platform", "fit", "is_final",
    "platform_classes", "predict", "interpret", "parse", "print_unit", "LearnConfig",
    "QTable", "TrainingGraph", "select_action", "train", "transform_greedy",
    "apply_rule", "find_sites", "registry",
]
