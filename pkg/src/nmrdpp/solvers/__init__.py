"""Explicit, heuristic-search and structured MDP solvers."""
from .explicit import Solution, SolverConfig, policy_iteration, policy_value, value_iteration
from .lao import LaoResult, XmdpGenerator, default_heuristic, lao_star
from .spudd import SpuddResult, spudd_solve

__all__ = [
    "LaoResult", "Solution", "SolverConfig", "SpuddResult", "XmdpGenerator", "default_heuristic",
    "lao_star", "policy_iteration", "policy_value", "spudd_solve", "value_iteration",
]
