"""Experiment suites: each is a matrix of independent runs written as one CSV."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

from ..domain.generators import gen_builtin
from ..domain.model import FactoredNMRDP
from ..errors import NmrdppError
from ..logic.rewards import RewardSpec
from ..solvers.explicit import SolverConfig
from .run import Caps, RunConfig, RunStats, dialect_of, run, write_csv
from .specs import TABLE1_KINDS, dynamics_spec, guard_spec, multi_spec, syntax_spec, table1_spec

HAND_CODED = ("spudd-linear", "spudd-expon", "on-off", "complete")
SUITES = ("table1", "multi-reward", "syntax", "guards", "dynamics")
N_MAX_EXPLICIT = 8
N_MAX_STRUCTURED = 12

EXPLICIT_METHODS = (("pltlsim", "vi"), ("pltlmin", "vi"), ("fltl", "vi"), ("fltl", "lao-vi"))
STRUCTURED_METHODS = (("pltlstr", "spudd"), ("pltlstr-a", "spudd"))


@dataclass(frozen=True)
class Cell:
    method: str
    solver: str
    family: str
    n: int
    spec_id: str
    domain: Callable[[], FactoredNMRDP]
    spec: Callable[[str], RewardSpec]  # dialect -> spec


def run_cell(cell: Cell, caps: Caps, discount: float) -> RunStats:
    """Run one cell; cap exhaustion or infeasibility is recorded, not raised."""
    cfg = RunConfig(cell.method, cell.solver, domain=cell.domain(),
                    rewards=cell.spec(dialect_of(cell.method)),
                    solver_cfg=SolverConfig(discount), caps=caps,
                    family=cell.family, n=cell.n, spec_id=cell.spec_id)
    try:
        stats = run(cfg)
    except NmrdppError as exc:
        stats = getattr(exc, "stats", None)
        if stats is None:
            stats = RunStats(cell.method, cell.solver, cell.family, cell.n, cell.spec_id)
            stats.status = type(exc).__name__
    stats.xmdp = None  # do not keep whole expansions alive across a suite
    return stats


def _matrix(n_max, n_max_structured):
    """Method/solver pairs with the largest n each is run at."""
    return ([(m, s, n_max) for m, s in EXPLICIT_METHODS]
            + [(m, s, n_max_structured) for m, s in STRUCTURED_METHODS])


def suite_cells(name: str, n_max: int = N_MAX_EXPLICIT, n_max_structured: int = N_MAX_STRUCTURED,
                discount: float = 0.9, r_values=None) -> list[Cell]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    cells: list[Cell] = []
    matrix = _matrix(n_max, n_max_structured)

    def dom(family, n):
        return lambda: gen_builtin(family, n, discount)

    if name == "table1":
        for method, solver, top in matrix:
            for family in HAND_CODED:
                for n in range(1, top + 1):
                    for kind in TABLE1_KINDS:
                        if kind == "consecutive" and n < 2:
                            continue
                        cells.append(Cell(method, solver, family, n, kind, dom(family, n),
                                          lambda dl, k=kind, n=n: table1_spec(k, dl, n)))
    elif name == "multi-reward":
        for method, solver, top in matrix:
            for family in HAND_CODED:
                for n in range(1, top + 1):
                    cells.append(Cell(method, solver, family, n, "multi", dom(family, n),
                                      lambda dl, n=n: multi_spec(dl, n)))
    elif name == "syntax":
        for method, solver, top in matrix:
            for n in range(1, top + 1):
                for form in ("out", "in"):
                    cells.append(Cell(method, solver, "complete", n, f"prv-{form}", dom("complete", n),
                                      lambda dl, f=form, n=n: syntax_spec(f, dl, n)))
    elif name == "guards":
        for method, solver, top in matrix:
            for n in range(1, top + 1):
                for hidden in ("c", "g"):
                    def domain(n=n, hidden=hidden):
                        return gen_builtin("spudd-linear", n, discount).add_inert_propositions([hidden])
                    trig, goal = ("c", f"p{n}") if hidden == "c" else ("p1", "g")
                    cells.append(Cell(method, solver, "spudd-linear", n, f"{hidden}-unreachable", domain,
                                      lambda dl, n=n, t=trig, g=goal: guard_spec(dl, n, t, g)))
    else:  # dynamics
        n = 4
        rs = r_values or (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0)
        pairs = (("fltl", "lao-vi"), ("pltlstr", "spudd"), ("pltlmin", "vi"))
        for method, solver in pairs:
            for against in ("goal", "trigger"):
                for r in rs:
                    cells.append(Cell(method, solver, "on-off", n, f"{against}-r{r:g}", dom("on-off", n),
                                      lambda dl, r=r, a=against: dynamics_spec(dl, n, "p1", f"p{n}",
                                                                               1.0, r, a)))
    return cells


def run_suite(name: str, out_dir: str | None = None, n_max: int = N_MAX_EXPLICIT,
              n_max_structured: int = N_MAX_STRUCTURED, caps: Caps | None = None,
              discount: float = 0.9, r_values=None, progress=None) -> list[RunStats]:
    """Run every cell of a suite; write ``<out_dir>/<name>.csv`` when asked.

    Rows are sorted by their key columns so the file does not depend on the
    order cells ran in.
    """
    caps = caps or Caps()
    rows = []
    for cell in suite_cells(name, n_max, n_max_structured, discount, r_values):
        stats = run_cell(cell, caps, discount)
        rows.append(stats)
        if progress is not None:
            progress(stats)
    rows.sort(key=lambda s: (s.method, s.solver, s.family, s.n or 0, s.spec_id))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"{name}.csv"), "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    return rows
