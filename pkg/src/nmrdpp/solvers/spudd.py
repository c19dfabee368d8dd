"""Structured value iteration over decision diagrams (SPUDD style)."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..dd.manager import Diagram
from ..translate.pltlstr import FactoredMDP, primed
from .explicit import SolverConfig


@dataclass
class SpuddResult:
    value: Diagram
    policy: Diagram  # leaves are action indices
    actions: list[str]
    iterations: int
    converged: bool = True
    residuals: list[float] = field(default_factory=list)

    def value_at(self, assignment) -> float:
        return self.value.evaluate(assignment)

    def action_at(self, assignment) -> str:
        return self.actions[int(self.policy.evaluate(assignment))]

    @property
    def value_nodes(self) -> int:
        return self.value.size


def _backups(fm: FactoredMDP, V: Diagram, beta: float) -> list[Diagram]:
    """Q-function diagram of every action for the value ``V``."""
    Vp = V.rename(fm.prime)
    out = []
    for a in fm.actions:
        Q = Vp
        for v in fm.current_vars:
            pv = primed(v)
            if pv not in Q.support():
                continue
            Q = (Q * fm.dual(a, v)).sum_over([pv])
        out.append(fm.reward + Q * beta)
    return out


def _mask(fm, d: Diagram) -> Diagram:
    if fm.reach is None:
        return d
    return fm.reach.ite(d, 0.0)


def spudd_solve(fm: FactoredMDP, cfg: SolverConfig | None = None) -> SpuddResult:
    """Iterate ``V = max_a (R + beta * sum_x' P_a(x'|x) V(x'))`` on diagrams.

    With a reachability diagram attached, values outside it are pinned to 0
    and do not count towards the residual.
    """
    cfg = cfg or SolverConfig(fm.d.discount)
    beta = cfg.discount
    mgr = fm.manager
    V = _mask(fm, fm.reward)
    residuals = []
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        qs = _backups(fm, V, beta)
        Vn = qs[0]
        for q in qs[1:]:
            Vn = Vn.maximum(q)
        Vn = _mask(fm, Vn)
        res = Vn.apply("absdiff", V).max_leaf()
        residuals.append(res)
        V = Vn
        if len(mgr) > 2_000_000:
            mgr.clear_cache()
        if res <= cfg.threshold:
            converged = True
            break
    policy = _greedy(fm, _backups(fm, V, beta))
    return SpuddResult(V, policy, list(fm.actions), it, converged, residuals)


def _greedy(fm, qs: list[Diagram]) -> Diagram:
    """Action-index diagram; a later action wins only when strictly better."""
    best = qs[0]
    pol = fm.manager.const(0)
    for k, q in enumerate(qs[1:], 1):
        better = q.apply("gt", best + 1e-12 * (1.0 + _absmax(best)))
        pol = better.ite(k, pol)
        best = best.maximum(q)
    return _mask(fm, pol)


def _absmax(d: Diagram) -> float:
    leaves = d.leaves()
    return max(abs(leaves[0]), abs(leaves[-1]))
