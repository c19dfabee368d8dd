"""Formulas, parsing, regression (past) and progression (future)."""
from .fltl import progress, refuted, reward_trace
from .formula import Formula
from .parser import FLTL, PLTL, format_formula, parse_formula
from .pltl import (
    Closure, LiteralSet, TraceEvaluator, entails, evaluate_pltl,
    pure_temporal_subformulas, regress, subformula_closure,
)
from .rewards import RewardEntry, RewardSpec, parse_reward_file
from .simplify import boolean_normal_form, canonical, simplify

__all__ = [
    "FLTL", "PLTL", "Closure", "Formula", "LiteralSet", "RewardEntry", "RewardSpec",
    "TraceEvaluator", "boolean_normal_form", "canonical", "entails", "evaluate_pltl", "format_formula",
    "parse_formula", "parse_reward_file", "progress", "pure_temporal_subformulas",
    "refuted", "regress", "reward_trace", "simplify", "subformula_closure",
]
