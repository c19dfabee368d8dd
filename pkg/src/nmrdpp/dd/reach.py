"""Forward reachability by image computation over 0/1 transition relations."""
from __future__ import annotations

from typing import Mapping, Sequence

from .manager import Diagram


def image(states: Diagram, relation: Diagram, current: Sequence[str],
          prime: Mapping[str, str]) -> Diagram:
    """Successors of ``states`` under ``relation`` (over current and primed variables)."""
    mgr = states.mgr
    step = mgr.abstract("or", mgr.apply("and", states.node, relation.node), current)
    return Diagram(mgr, mgr.rename(step, {p: c for c, p in prime.items()}))


def reachable_set(start: Diagram, relations: Sequence[Diagram], current: Sequence[str],
                  prime: Mapping[str, str], max_steps: int | None = None) -> Diagram:
    """Least fixpoint of ``R = start | image(R)`` over all relations.

    With ``max_steps`` the iteration stops after that many image steps, giving
    the set reachable within that many transitions.
    """
    reach = start
    frontier = start
    steps = 0
    while max_steps is None or steps < max_steps:
        new = start.mgr.const(0)
        for rel in relations:
            new = new | image(frontier, rel, current, prime)
        grown = reach | new
        steps += 1
        if grown == reach:
            break
        frontier = new & ~reach
        reach = grown
    return reach


def reachable_estates(fmdp, start: Mapping[str, bool] | None = None,
                      max_steps: int | None = None) -> Diagram:
    """Characteristic function of the e-states reachable in a factored MDP.

    ``fmdp`` supplies ``manager``, ``current_vars``, ``prime`` (current to
    primed name), ``relations()`` (one 0/1 diagram per action: non-zero
    probabilities turned into ones) and ``initial`` (a total assignment used
    when ``start`` is omitted).
    """
    start = fmdp.initial if start is None else start
    mgr = fmdp.manager
    s0 = mgr.cube({v: bool(start[v]) for v in fmdp.current_vars})
    return reachable_set(s0, fmdp.relations(), fmdp.current_vars, fmdp.prime, max_steps)
