"""Run pipeline, experiment suites, policy simulation and the command line."""
from .run import (
    CSV_COLUMNS, METHODS, SOLVERS, Caps, RunConfig, RunStats, apply_control, load_inputs, run,
    write_csv,
)
from .simulate import Rollout, estimate_value, simulate_policy
from .specs import POOL, SINGLE_REWARD_IDS, PairedSpec, get_spec
from .suites import SUITES, run_suite, suite_cells

__all__ = [
    "CSV_COLUMNS", "Caps", "METHODS", "POOL", "PairedSpec", "Rollout", "RunConfig", "RunStats",
    "SINGLE_REWARD_IDS", "SOLVERS", "SUITES", "apply_control", "estimate_value", "get_spec",
    "load_inputs", "run", "run_suite", "simulate_policy", "suite_cells", "write_csv",
]
