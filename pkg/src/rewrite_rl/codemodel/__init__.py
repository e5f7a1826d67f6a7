"""Parse, print and interpret the restricted C subset."""

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
    Path,
    Pragma,
    TranslationUnit,
    Var,
    VarDecl,
    node_at,
    replace_at,
    walk,
)
from .interp import DEFAULT_STEP_BUDGET, interpret
from .parser import parse
from .printer import print_unit
from .semantics import Bindings, check_unit, resolve

__all__ = [
    "ArrayAccess", "Assign", "BinOp", "Block", "Break", "Call", "Continue", "Decl",
    "For", "FunctionDef", "If", "IntLit", "Path", "Pragma", "TranslationUnit", "Var",
    "VarDecl", "node_at", "replace_at", "walk", "DEFAULT_STEP_BUDGET", "interpret",
    "parse", "print_unit", "Bindings", "check_unit", "resolve",
]
