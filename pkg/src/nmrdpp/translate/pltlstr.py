"""Structured PLTL translation: temporal variables plus decision diagrams.

Each temporal variable stands for a formula ``prv chi`` and evolves
deterministically: its next value is the current truth of ``chi``. Such a
variable is created for every ``prv chi`` in the purely temporal subformulas
and for ``prv (a snc b)`` for every since-subformula ``a snc b``; the two
sources are merged when they coincide. The current truth of ``a snc b`` is
then ``b | (a & t)`` with ``t`` the variable for ``prv (a snc b)``.
"""
from __future__ import annotations

from ..dd.manager import Diagram, Manager
from ..dd.reach import reachable_estates
from ..domain.model import FactoredNMRDP
from ..errors import ConfigError
from ..logic import formula as F
from ..logic.formula import AND, ATOM, FALSE_OP, NOT, OR, PREV, SINCE, TRUE_OP, Formula
from ..logic.pltl import pure_temporal_subformulas
from ..logic.rewards import RewardSpec
from .xmdp import DEFAULT_ESTATE_CAP, XMDP, expand

DEFAULT_NODE_BUDGET = 10_000_000


def primed(v: str) -> str:
    return v + "'"


class FactoredMDP:
    """State variables plus temporal variables, with diagram dynamics.

    ``cpt[a][v]`` is the probability that ``v`` is true next under action
    ``a``, a diagram over current variables. ``reward`` is the immediate
    reward over current variables. ``reach`` optionally restricts attention
    to reachable assignments.
    """

    def __init__(self, d: FactoredNMRDP, spec: RewardSpec, node_budget: int | None = DEFAULT_NODE_BUDGET):
        if spec.dialect != "pltl":
            raise ConfigError("the structured translation needs a pltl reward specification")
        if spec.control:
            raise ConfigError("control knowledge is not supported by the structured translation")
        self.d = d
        self.spec = spec
        self.actions = d.action_names
        self.state_vars = list(d.propositions)
        ptsub = pure_temporal_subformulas(spec.formulas)
        # formula prv(chi) -> (variable name, chi)
        self.tvar: dict[Formula, str] = {}
        self.tnext: dict[str, Formula] = {}
        for psi in ptsub:
            chi = psi.args[0] if psi.op == PREV else psi
            rep = F.prev(chi)
            if rep not in self.tvar:
                name = f"t#{len(self.tvar) + 1}"
                self.tvar[rep] = name
                self.tnext[name] = chi
        self.temporal_vars = list(self.tnext)
        order = []
        for v in self.state_vars + self.temporal_vars:
            order += [v, primed(v)]
        self.manager = Manager(order, node_budget)
        self.current_vars = self.state_vars + self.temporal_vars
        self.prime = {v: primed(v) for v in self.current_vars}
        self._cur: dict[Formula, Diagram] = {}
        self.initial = {**d.valuation(d.initial), **{t: False for t in self.temporal_vars}}
        self.cpt: dict[str, dict[str, Diagram]] = {}
        for a in self.actions:
            row = {v: self._tree(d.actions[a][v]) for v in self.state_vars}
            for t in self.temporal_vars:
                row[t] = self.cur(self.tnext[t])
            self.cpt[a] = row
        m = self.manager
        self.reward = m.const(0.0)
        for e in spec.entries:
            self.reward = self.reward + self.cur(e.formula) * e.value
        self.reach: Diagram | None = None
        self._relations = None

    # -- construction helpers -------------------------------------------------

    def _tree(self, t) -> Diagram:
        m = self.manager
        if isinstance(t, tuple):
            return m.var(t[0]).ite(self._tree(t[1]), self._tree(t[2]))
        return m.const(t)

    def cur(self, phi: Formula) -> Diagram:
        """0/1 diagram for the current truth of ``phi`` over current variables."""
        hit = self._cur.get(phi)
        if hit is not None:
            return hit
        m = self.manager
        op = phi.op
        if op == TRUE_OP:
            out = m.const(1)
        elif op == FALSE_OP:
            out = m.const(0)
        elif op == ATOM:
            out = m.var(phi.name)
        elif op == NOT:
            out = ~self.cur(phi.args[0])
        elif op == AND:
            out = self.cur(phi.args[0]) & self.cur(phi.args[1])
        elif op == OR:
            out = self.cur(phi.args[0]) | self.cur(phi.args[1])
        elif op == PREV:
            out = m.var(self.tvar[phi])
        elif op == SINCE:
            a, b = phi.args
            out = self.cur(b) | (self.cur(a) & m.var(self.tvar[F.prev(phi)]))
        else:
            raise ValueError(f"not a PLTL formula: {phi}")
        self._cur[phi] = out
        return out

    # -- views used by solvers and reachability --------------------------------

    def dual(self, a: str, v: str) -> Diagram:
        """Joint diagram over ``v'`` and current variables: ``v' ? P : 1 - P``."""
        p = self.cpt[a][v]
        return self.manager.var(primed(v)).ite(p, 1 - p)

    def relations(self) -> list[Diagram]:
        """Per-action 0/1 transition relations (non-zero probabilities set to one)."""
        if self._relations is None:
            m = self.manager
            rels = []
            for a in self.actions:
                rel = m.const(1)
                for v in reversed(self.current_vars):
                    p = self.cpt[a][v]
                    can_true = p.apply("gt", 0.0)
                    can_false = m.const(1.0).apply("gt", p)
                    rel = rel & m.var(primed(v)).ite(can_true, can_false)
                rels.append(rel)
            self._relations = rels
        return self._relations

    def assignment(self, s: int, tvals: tuple[bool, ...]) -> dict[str, bool]:
        out = dict(self.d.valuation(s))
        out.update(zip(self.temporal_vars, tvals))
        return out

    @property
    def n_vars(self) -> int:
        return len(self.current_vars)


def pltlstr_translate(d: FactoredNMRDP, spec: RewardSpec,
                      node_budget: int | None = DEFAULT_NODE_BUDGET) -> FactoredMDP:
    return FactoredMDP(d, spec, node_budget)


def pltlstr_reachability(fm: FactoredMDP, max_steps: int | None = None) -> FactoredMDP:
    """Attach the reachable-e-state diagram (state and temporal variables)."""
    fm.reach = reachable_estates(fm, fm.initial, max_steps)
    return fm


class FactoredGenerator:
    """Explicit e-states ``(s, temporal values)`` of a factored MDP."""

    def __init__(self, fm: FactoredMDP):
        self.fm = fm
        self.actions = fm.actions
        self.n_props = fm.d.n
        self._cache: dict = {}

    def initial(self):
        return (self.fm.d.initial, tuple(False for _ in self.fm.temporal_vars))

    def _info(self, key):
        info = self._cache.get(key)
        if info is None:
            fm = self.fm
            asg = fm.assignment(*key)
            nxt = tuple(bool(fm.cur(fm.tnext[t]).evaluate(asg)) for t in fm.temporal_vars)
            info = (nxt, fm.reward.evaluate(asg))
            self._cache[key] = info
        return info

    def successors(self, key, a):
        nxt, _ = self._info(key)
        return [((s2, nxt), p) for s2, p in self.fm.d.successors(key[0], a)]

    def state(self, key):
        return key[0]

    def label(self, key):
        return key[1]

    def reward(self, key):
        return self._info(key)[1]

    def dead(self, key):
        return False


def expand_factored(fm: FactoredMDP, cap: int = DEFAULT_ESTATE_CAP) -> XMDP:
    """Explicit MDP over the reachable (state, temporal assignment) pairs."""
    return expand(FactoredGenerator(fm), cap, fm.d.discount)
