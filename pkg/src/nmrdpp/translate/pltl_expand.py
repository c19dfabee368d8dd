"""PLTL translations by regression: full-closure labels and minimal label maps."""
from __future__ import annotations

from collections import deque

from ..domain.model import FactoredNMRDP
from ..logic.formula import Formula
from ..logic.pltl import LiteralSet, entails, evaluate_pltl, regress, subformula_closure
from ..logic.rewards import RewardSpec
from ..logic.simplify import boolean_normal_form, simplify
from ..errors import ConfigError
from .xmdp import DEFAULT_ESTATE_CAP, XMDP, expand

LabelMap = dict[int, tuple[Formula, ...]]


def _check_pltl(spec: RewardSpec):
    if spec.dialect != "pltl":
        raise ConfigError("this translation needs a pltl reward specification")


def _targets(spec: RewardSpec):
    """Simplified reward and control formulas.

    Regression simplifies its result, temporal subterms included, so labels
    are built over simplified formulas: their subterms are already in normal
    form and every regression stays inside the closure.
    """
    return [simplify(e.formula) for e in spec.entries], [simplify(c) for c in spec.control]


class PltlGenerator:
    """E-states ``(s, Psi)`` where ``Psi`` is the set of candidate formulas true now.

    Candidates are the whole subformula closure (simple translation) or, when
    a label map is given, the formulas ``l(s)`` attached to the current state
    (minimal translation). A successor label is
    ``{psi' in candidates(s') | Psi entails Reg(psi', s')}``.
    """

    def __init__(self, d: FactoredNMRDP, spec: RewardSpec, labels: LabelMap | None = None):
        _check_pltl(spec)
        self.d = d
        self.spec = spec
        self.actions = d.action_names
        self.n_props = d.n
        self.rewards, self.control = _targets(spec)
        self.values = [e.value for e in spec.entries]
        self.targets = self.rewards + self.control
        if labels is None:
            closure = frozenset(subformula_closure(self.targets))
            self._order = tuple(subformula_closure(self.targets))
            self._domains = None
            self._closure = closure
        else:
            self._domains = {s: frozenset(fs) for s, fs in labels.items()}
            self._order_of = {s: tuple(fs) for s, fs in labels.items()}
        self._reg: dict = {}
        self._next: dict = {}

    def candidates(self, s: int) -> tuple[Formula, ...]:
        if self._domains is None:
            return self._order
        return self._order_of[s]

    def domain(self, s: int) -> frozenset:
        if self._domains is None:
            return self._closure
        return self._domains[s]

    def _regress(self, psi, s):
        key = (psi, s)
        r = self._reg.get(key)
        if r is None:
            r = boolean_normal_form(regress(psi, self.d.valuation(s)))
            self._reg[key] = r
        return r

    def initial(self):
        s0 = self.d.initial
        first = [self.d.valuation(s0)]
        return (s0, frozenset(f for f in self.candidates(s0) if evaluate_pltl(f, first)))

    def _label(self, s, lab, s2):
        key = (s, lab, s2)
        out = self._next.get(key)
        if out is None:
            psi = LiteralSet(self.domain(s), lab)
            out = frozenset(f for f in self.candidates(s2) if entails(psi, self._regress(f, s2)))
            self._next[key] = out
        return out

    def successors(self, key, a):
        s, lab = key
        return [((s2, self._label(s, lab, s2)), p) for s2, p in self.d.successors(s, a)]

    def state(self, key):
        return key[0]

    def label(self, key):
        return key[1]

    def reward(self, key):
        psi = LiteralSet(self.domain(key[0]), key[1])
        return sum(v for f, v in zip(self.rewards, self.values) if entails(psi, f))

    def dead(self, key):
        psi = LiteralSet(self.domain(key[0]), key[1])
        return not all(entails(psi, c) for c in self.control)


def pltlsim_expand(d: FactoredNMRDP, spec: RewardSpec, cap: int = DEFAULT_ESTATE_CAP) -> XMDP:
    return expand(PltlGenerator(d, spec), cap, d.discount)


def pltlmin_preprocess(d: FactoredNMRDP, spec: RewardSpec, max_rounds: int = 10_000_000) -> LabelMap:
    """Least label map with ``l(s) >= Phi`` and ``l(s) >= {Reg(psi', s') | psi' in l(s')}``.

    Computed over the states reachable from the start (other states cannot
    influence them). Regressions are stored simplified; constants are dropped.
    """
    _check_pltl(spec)
    rewards, control = _targets(spec)
    targets = [f for f in rewards + control if not f.is_const]
    states = d.reachable_states()
    preds: dict[int, set[int]] = {s: set() for s in states}
    for s in states:
        for a in d.action_names:
            for s2, _ in d.successors(s, a):
                preds[s2].add(s)
    labels: dict[int, dict[Formula, None]] = {s: dict.fromkeys(targets) for s in states}
    done: dict[int, int] = {s: 0 for s in states}  # prefix of labels[s] already pushed back
    work = deque(states)
    queued = set(states)
    rounds = 0
    while work:
        s2 = work.popleft()
        queued.discard(s2)
        members = list(labels[s2])
        fresh = members[done[s2]:]
        done[s2] = len(members)
        val = d.valuation(s2)
        for psi in fresh:
            rounds += 1
            if rounds > max_rounds:
                raise RuntimeError("label fixpoint did not stabilise")
            r = boolean_normal_form(regress(psi, val))
            if r.is_const:
                continue
            for s in preds[s2]:
                lab = labels[s]
                if r not in lab:
                    lab[r] = None
                    if s not in queued:
                        queued.add(s)
                        work.append(s)
    return {s: tuple(lab) for s, lab in labels.items()}


def pltlmin_expand(d: FactoredNMRDP, spec: RewardSpec, labels: LabelMap | None = None,
                   cap: int = DEFAULT_ESTATE_CAP) -> XMDP:
    if labels is None:
        labels = pltlmin_preprocess(d, spec)
    return expand(PltlGenerator(d, spec, labels), cap, d.discount)
