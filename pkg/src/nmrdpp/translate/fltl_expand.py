"""On-line $FLTL translation by formula progression."""
from __future__ import annotations

from ..domain.model import FactoredNMRDP
from ..errors import ConfigError
from ..logic.fltl import progress
from ..logic.formula import FALSE
from ..logic.rewards import RewardSpec
from ..logic.simplify import boolean_normal_form, canonical
from .xmdp import DEFAULT_ESTATE_CAP, XMDP, expand


def _norm(f):
    """Key form of a progressed formula; a boolean canonical form keeps the set finite."""
    return boolean_normal_form(canonical(f), monotone=True)


class FltlGenerator:
    """E-states reached by progressing the reward formulas along the history.

    Arriving in state ``s`` with formulas ``Phi`` progresses each formula
    through ``s``; the entries whose progression is rewarded make up the
    e-state's reward. The key is ``(s, reward, progressed formulas,
    progressed controls)``: everything the future depends on. Two histories
    that agree on it are merged even if their formulas before ``s``
    differed, which is sound because the rest of the process only ever sees
    the progressed formulas.
    """

    def __init__(self, d: FactoredNMRDP, spec: RewardSpec):
        if spec.dialect != "fltl":
            raise ConfigError("the fltl translation needs an fltl reward specification")
        self.d = d
        self.spec = spec
        self.actions = d.action_names
        self.n_props = d.n
        self.values = [e.value for e in spec.entries]
        self.start_formulas = tuple(_norm(e.formula) for e in spec.entries)
        self.start_control = tuple(_norm(c) for c in spec.control)
        self._arrive_cache: dict = {}

    def _arrive(self, s, formulas, control):
        key = (s, formulas, control)
        out = self._arrive_cache.get(key)
        if out is not None:
            return out
        val = self.d.valuation(s)
        total = 0.0
        nxt = []
        for f, v in zip(formulas, self.values):
            g, hit = progress(f, val)
            if hit:
                total += v
            nxt.append(_norm(g))
        ctl = tuple(_norm(progress(c, val)[0]) for c in control)
        out = (s, total, tuple(nxt), ctl)
        self._arrive_cache[key] = out
        return out

    def initial(self):
        return self._arrive(self.d.initial, self.start_formulas, self.start_control)

    def successors(self, key, a):
        _, _, formulas, control = key
        return [(self._arrive(s2, formulas, control), p) for s2, p in self.d.successors(key[0], a)]

    def state(self, key):
        return key[0]

    def label(self, key):
        return key[2] + key[3]

    def reward(self, key):
        return key[1]

    def dead(self, key):
        return FALSE in key[3]


def fltl_expand(d: FactoredNMRDP, spec: RewardSpec, cap: int = DEFAULT_ESTATE_CAP) -> XMDP:
    return expand(FltlGenerator(d, spec), cap, d.discount)
