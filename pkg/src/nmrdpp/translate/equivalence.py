"""Checking that an expanded MDP is equivalent to its NMRDP, and minimising one.

Equivalence means: the start e-state maps to the start state; every e-state
offers the actions of its state; each NMRDP transition lifts to exactly one
successor e-state with the same probability (the same one for every
action); and along every feasible state sequence the lifted e-states carry
the reward the temporal formulas assign to that prefix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..domain.model import FactoredNMRDP
from ..logic.fltl import progress
from ..logic.pltl import TraceEvaluator
from ..logic.rewards import RewardSpec
from .xmdp import XMDP

PROB_TOL = 1e-9
REWARD_TOL = 1e-9


@dataclass
class EquivalenceReport:
    ok: bool = True
    item: int | None = None
    message: str = ""
    trace: list[int] = field(default_factory=list)
    traces_checked: int = 0

    def fail(self, item, message, trace=()):
        self.ok = False
        self.item = item
        self.message = message
        self.trace = list(trace)
        return self

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"equivalent ({self.traces_checked} traces checked)"
        return f"item {self.item} fails: {self.message}; trace {self.trace}"


def check_equivalence(d: FactoredNMRDP, m: XMDP, horizon: int = 6,
                      spec: RewardSpec | None = None, pruned: bool = False) -> EquivalenceReport:
    """Verify items 1 to 4 of equivalence; report the first counterexample.

    With ``pruned=True`` (control knowledge applied) an e-state may offer a
    subset of the actions; every other item is checked unchanged.
    """
    spec = spec if spec is not None else d.rewards
    rep = EquivalenceReport()
    actions = d.action_names
    # item 1
    if m.state[m.start] != d.initial:
        return rep.fail(1, f"start e-state maps to {m.state[m.start]}, not {d.initial}")
    # items 2 and 3; lift[e][s2] is the unique successor e-state
    lift: list[dict[int, int]] = []
    for e in range(len(m)):
        row = m.trans[e]
        if m.dead[e]:
            lift.append({})
            continue
        have = [a for a in actions if a in row]
        if have != actions and not (pruned and set(have) <= set(actions) and have):
            return rep.fail(2, f"e-state {e} offers {have}, state offers {actions}")
        lifted: dict[int, int] = {}
        s = m.state[e]
        for a in have:
            want = dict(d.successors(s, a))
            got: dict[int, float] = {}
            for j, p in row[a]:
                s2 = m.state[j]
                if s2 in got:
                    return rep.fail(3, f"e-state {e}, action {a}: two successors map to state {s2}")
                got[s2] = p
                if lifted.setdefault(s2, j) != j:
                    return rep.fail(3, f"e-state {e}: state {s2} lifts to different e-states across actions")
            if set(got) != set(want):
                return rep.fail(3, f"e-state {e}, action {a}: successor states differ")
            for s2, p in want.items():
                if abs(got[s2] - p) > PROB_TOL:
                    return rep.fail(3, f"e-state {e}, action {a}: Pr to {s2} is {got[s2]}, expected {p}")
        lift.append(lifted)
    # item 4
    if spec is None:
        return rep
    feasible: dict[int, list[int]] = {}

    def next_states(s):
        out = feasible.get(s)
        if out is None:
            seen = set()
            for a in actions:
                seen.update(t for t, _ in d.successors(s, a))
            out = sorted(seen)
            feasible[s] = out
        return out

    if spec.dialect == "pltl":
        ev = TraceEvaluator()

        def stage_reward(_state):
            return sum(e.value for e in spec.entries if ev.holds(e.formula))

        def push(s):
            ev.push(d.valuation(s))
            return None

        def pop(_token):
            ev.pop()
    else:
        forms = [[e.formula for e in spec.entries]]
        hits: list[float] = []

        def push(s):
            val = d.valuation(s)
            nxt, total = [], 0.0
            for f, e in zip(forms[-1], spec.entries):
                g, hit = progress(f, val)
                nxt.append(g)
                if hit:
                    total += e.value
            forms.append(nxt)
            hits.append(total)
            return None

        def pop(_token):
            forms.pop()
            hits.pop()

        def stage_reward(_state):
            return hits[-1]

    trace: list[int] = []

    def walk(s, e, depth):
        trace.append(s)
        token = push(s)
        try:
            want = stage_reward(s)
            got = m.reward[e]
            if abs(want - got) > REWARD_TOL:
                rep.fail(4, f"stage {depth}: e-state {e} has reward {got}, trace reward {want}", trace)
                return False
            rep.traces_checked += 1
            if depth + 1 >= horizon or m.dead[e]:
                return True
            for s2 in next_states(s):
                j = lift[e].get(s2)
                if j is None:
                    if pruned:
                        continue
                    rep.fail(3, f"state {s2} has no lifted successor from e-state {e}", trace + [s2])
                    return False
                if not walk(s2, j, depth + 1):
                    return False
            return True
        finally:
            pop(token)
            trace.pop()

    walk(d.initial, m.start, 0)
    return rep


def bisimulation_quotient(m: XMDP, digits: int = 12) -> list[int]:
    """Coarsest reward-respecting bisimulation; returns a block id per e-state.

    Blocks start from ``(state, reward, offered actions, dead)`` and are split
    by the per-action probability of reaching each block until stable.
    """
    def initial_sig(e):
        return (m.state[e], round(m.reward[e], digits), tuple(m.allowed(e)), m.dead[e])

    block = _renumber([initial_sig(e) for e in range(len(m))])
    while True:
        sigs = []
        for e in range(len(m)):
            parts = []
            for a in m.actions:
                dist = m.trans[e].get(a)
                if dist is None:
                    continue
                agg: dict[int, float] = {}
                for j, p in dist:
                    agg[block[j]] = agg.get(block[j], 0.0) + p
                parts.append((a, tuple(sorted((b, round(p, digits)) for b, p in agg.items()))))
            sigs.append((block[e], tuple(parts)))
        new = _renumber(sigs)
        if max(new, default=-1) == max(block, default=-1):
            return new
        block = new


def _renumber(sigs):
    ids: dict = {}
    return [ids.setdefault(s, len(ids)) for s in sigs]


def quotient_size(m: XMDP) -> int:
    return len(set(bisimulation_quotient(m)))
