"""Explicit expanded MDPs and the generic forward expansion driver.

E-state generators (for PLTL labels, FLTL progression or factored temporal
variables) all expose the same small protocol:

* ``actions``: action names in declaration order
* ``initial()``: key of the start e-state
* ``successors(key, a)``: list of ``(key, probability)``
* ``reward(key)``, ``state(key)``, ``label(key)``
* ``dead(key)``: whether control knowledge rules the e-state out

Keys are hashable and identify e-states; equal keys are merged.
"""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import EstateBudgetExceeded, InfeasibleError

DEFAULT_ESTATE_CAP = 2_000_000


@dataclass
class XMDP:
    """Finite MDP over e-states; index 0 is the start e-state."""

    actions: list[str]
    state: list[int] = field(default_factory=list)
    label: list = field(default_factory=list)
    reward: list[float] = field(default_factory=list)
    trans: list[dict[str, list[tuple[int, float]]]] = field(default_factory=list)
    dead: list[bool] = field(default_factory=list)
    discount: float = 0.9
    start: int = 0
    n_props: int | None = None
    keys: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.state)

    @property
    def n_live(self) -> int:
        return sum(1 for d in self.dead if not d)

    def allowed(self, e: int) -> list[str]:
        return [a for a in self.actions if a in self.trans[e]]

    def successor(self, e: int, a: str) -> list[tuple[int, float]]:
        return self.trans[e][a]

    def check_distributions(self, tol: float = 1e-9):
        for e, row in enumerate(self.trans):
            for a, dist in row.items():
                total = sum(p for _, p in dist)
                if abs(total - 1.0) > tol:
                    raise AssertionError(f"e-state {e}, action {a}: probabilities sum to {total}")

    def matrices(self):
        """Stacked transition matrix and action mask for vectorised solvers.

        Returns ``(P, R, mask)`` where ``P`` has shape ``(A*N, N)`` with row
        ``a*N + e`` the distribution of ``e`` under action ``a`` (zero when the
        action is not allowed) and ``mask[e, a]`` marks allowed pairs.
        """
        n, na = len(self), len(self.actions)
        rows, cols, vals = [], [], []
        mask = np.zeros((n, na), dtype=bool)
        for e, row in enumerate(self.trans):
            for k, a in enumerate(self.actions):
                dist = row.get(a)
                if dist is None:
                    continue
                mask[e, k] = True
                for j, p in dist:
                    rows.append(k * n + e)
                    cols.append(j)
                    vals.append(p)
        P = sparse.csr_matrix((vals, (rows, cols)), shape=(na * n, n))
        return P, np.asarray(self.reward, dtype=float), mask

    def dump(self, label_text=None) -> str:
        """Text form: ``e id, state-bits, label-hash, reward`` and ``t src, action, dst, prob`` lines.

        The label hash is a stable digest of ``label_text(label)`` (``str`` by default).
        """
        label_text = label_text or _label_text
        lines = []
        bits = self.n_props or max(max((s.bit_length() for s in self.state), default=1), 1)
        for e in range(len(self)):
            sb = "".join("1" if self.state[e] >> i & 1 else "0" for i in range(bits))
            h = hashlib.sha1(label_text(self.label[e]).encode()).hexdigest()[:12]
            lines.append(f"e {e}, {sb}, {h}, {self.reward[e]!r}")
        for e in range(len(self)):
            for a in self.actions:
                for j, p in self.trans[e].get(a, ()):
                    lines.append(f"t {e}, {a}, {j}, {p!r}")
        return "\n".join(lines) + "\n"


def _label_text(label) -> str:
    if isinstance(label, (frozenset, set)):
        return "{" + ", ".join(sorted(map(str, label))) + "}"
    if isinstance(label, tuple):
        return "(" + ", ".join(_label_text(x) for x in label) + ")"
    return str(label)


def expand(gen, cap: int = DEFAULT_ESTATE_CAP, discount: float = 0.9) -> XMDP:
    """Breadth-first expansion of every e-state reachable from ``gen.initial()``.

    Dead e-states are kept (so the structure stays faithful to the
    generator) but not expanded further.
    """
    m = XMDP(list(gen.actions), discount=discount)
    index: dict = {}

    def intern(key):
        i = index.get(key)
        if i is None:
            i = len(m.state)
            if i >= cap:
                raise EstateBudgetExceeded(f"e-state budget of {cap} exhausted", i)
            index[key] = i
            m.state.append(gen.state(key))
            m.label.append(gen.label(key))
            m.reward.append(gen.reward(key))
            m.dead.append(gen.dead(key))
            m.trans.append({})
            queue.append(key)
        return i

    queue: deque = deque()
    intern(gen.initial())
    while queue:
        key = queue.popleft()
        e = index[key]
        if m.dead[e]:
            continue
        row = m.trans[e]
        for a in m.actions:
            row[a] = [(intern(k2), p) for k2, p in gen.successors(key, a)]
    m.n_props = getattr(gen, "n_props", None)
    m.keys = list(index)
    return m


def prune_dead(m: XMDP) -> XMDP:
    """Remove behaviour that can run into a dead e-state.

    Fixpoint: an action is disallowed when any successor is dead, and an
    e-state left without actions becomes dead. The result keeps only e-states
    reachable from the start through allowed actions, renumbered in BFS order.
    """
    dead = list(m.dead)
    allowed = [dict(row) for row in m.trans]
    changed = True
    while changed:
        changed = False
        for e in range(len(m)):
            if dead[e]:
                continue
            row = allowed[e]
            for a in [a for a, dist in row.items() if any(dead[j] for j, _ in dist)]:
                del row[a]
                changed = True
            if not row:
                dead[e] = True
                changed = True
    if dead[m.start]:
        raise InfeasibleError("control knowledge rules out every behaviour from the start state")
    order = [m.start]
    new_id = {m.start: 0}
    q = deque(order)
    while q:
        e = q.popleft()
        for dist in allowed[e].values():
            for j, _ in dist:
                if j not in new_id:
                    new_id[j] = len(order)
                    order.append(j)
                    q.append(j)
    out = XMDP(list(m.actions), discount=m.discount)
    for e in order:
        out.state.append(m.state[e])
        out.label.append(m.label[e])
        out.reward.append(m.reward[e])
        out.dead.append(False)
        out.trans.append({a: [(new_id[j], p) for j, p in dist] for a, dist in allowed[e].items()})
    out.n_props = m.n_props
    if m.keys:
        out.keys = [m.keys[e] for e in order]
    return out
