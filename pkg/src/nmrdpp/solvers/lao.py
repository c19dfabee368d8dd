"""LAO* heuristic search over an on-line e-state generator.

The explicit graph grows only along the best partial policy. Every
iteration expands all unexpanded tips of the current best solution graph and
then re-solves the states of that graph (by value or policy iteration) with
all other values held fixed. When the graph has no tips left, a final value
iteration over it confirms convergence; if the best policy changed, search
resumes.

An action whose outcomes include a dead e-state (ruled out by control
knowledge) is never taken, and an e-state left without actions is dead
itself, mirroring :func:`~nmrdpp.translate.xmdp.prune_dead`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse

from ..errors import EstateBudgetExceeded, InfeasibleError
from ..translate.xmdp import DEFAULT_ESTATE_CAP, XMDP
from .explicit import SolverConfig


def default_heuristic(spec, discount: float) -> float:
    """Admissible constant bound: every stage earns at most the positive rewards."""
    return sum(max(e.value, 0.0) for e in spec.entries) / (1.0 - discount)


@dataclass
class LaoResult:
    v0: float
    values: dict
    policy: dict
    expanded: int
    generated: int
    iterations: int
    converged: bool = True
    keys: list = field(default_factory=list, repr=False)


class XmdpGenerator:
    """Present an explicit MDP through the generator protocol."""

    def __init__(self, m: XMDP, spec=None):
        self.m = m
        self.spec = spec
        self.actions = m.actions

    def initial(self):
        return self.m.start

    def successors(self, e, a):
        return self.m.trans[e].get(a, [])

    def allowed(self, e):
        return self.m.allowed(e)

    def reward(self, e):
        return self.m.reward[e]

    def state(self, e):
        return self.m.state[e]

    def label(self, e):
        return self.m.label[e]

    def dead(self, e):
        return self.m.dead[e]


class _Graph:
    def __init__(self, gen, h, cap):
        self.gen = gen
        self.h = h
        self.cap = cap
        self.index: dict = {}
        self.keys: list = []
        self.V: list[float] = []
        self.R: list[float] = []
        self.dead: list[bool] = []
        self.succ: list[dict | None] = []  # None while unexpanded
        self.best: list[int] = []  # index into gen.actions, -1 if none
        self.preds: list[set] = []

    def node(self, key):
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            if i >= self.cap:
                raise EstateBudgetExceeded(f"e-state budget of {self.cap} exhausted", i)
            self.index[key] = i
            self.keys.append(key)
            self.R.append(self.gen.reward(key))
            d = self.gen.dead(key)
            self.dead.append(d)
            self.V.append(-np.inf if d else self.h(key))
            self.succ.append(None)
            self.best.append(-1)
            self.preds.append(set())
        return i

    def expand(self, i):
        key = self.keys[i]
        allowed = getattr(self.gen, "allowed", None)
        names = allowed(key) if allowed else self.gen.actions
        row = {}
        for a in names:
            k = self.gen.actions.index(a)
            row[k] = [(self.node(k2), p) for k2, p in self.gen.successors(key, a)]
            for j, _ in row[k]:
                self.preds[j].add(i)
        self.succ[i] = row

    def propagate_dead(self, seeds):
        """Drop actions leading to dead e-states; kill e-states left with none."""
        work = list(seeds)
        while work:
            j = work.pop()
            for i in self.preds[j]:
                row = self.succ[i]
                if self.dead[i] or row is None:
                    continue
                for k in [k for k, dist in row.items() if any(self.dead[t] for t, _ in dist)]:
                    del row[k]
                if not row:
                    self.dead[i] = True
                    self.V[i] = -np.inf
                    work.append(i)

    def solution_graph(self, start):
        """States of the best partial solution graph, and its unexpanded tips."""
        seen = {start}
        order, tips = [], []
        stack = [start]
        while stack:
            i = stack.pop()
            if self.dead[i]:
                continue
            if self.succ[i] is None:
                tips.append(i)
                continue
            order.append(i)
            k = self.best[i]
            if k not in self.succ[i]:
                continue  # not solved yet, or its action was pruned
            for j, _ in self.succ[i][k]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return order, tips


def _local_system(g: _Graph, Z: list[int], na: int):
    """Sparse Q-system over the states ``Z`` with all other values fixed."""
    local = {i: n for n, i in enumerate(Z)}
    nz = len(Z)
    rows, cols, vals = [], [], []
    const = np.zeros((nz, na))
    mask = np.zeros((nz, na), dtype=bool)
    for n, i in enumerate(Z):
        for k, dist in g.succ[i].items():
            mask[n, k] = True
            for j, p in dist:
                c = local.get(j)
                if c is None:
                    const[n, k] += p * g.V[j]
                else:
                    rows.append(k * nz + n)
                    cols.append(c)
                    vals.append(p)
    P = sparse.csr_matrix((vals, (rows, cols)), shape=(na * nz, nz))
    R = np.array([g.R[i] for i in Z])
    return P, R, const, mask


def _backup(P, R, const, mask, V, beta):
    nz, na = mask.shape
    Q = R[:, None] + beta * ((P @ V).reshape(na, nz).T + const)
    Q[~mask] = -np.inf
    return Q


def _first_best(Q):
    best = Q.max(axis=1)
    tol = 1e-12 * (1.0 + np.abs(best))
    return np.argmax(Q >= (best - tol)[:, None], axis=1)


def _solve_vi(g, Z, na, beta, threshold, max_iter):
    P, R, const, mask = _local_system(g, Z, na)
    V = np.array([g.V[i] for i in Z])
    res = np.inf
    it = 0
    while it < max_iter:
        it += 1
        Vn = _backup(P, R, const, mask, V, beta).max(axis=1)
        res = float(np.max(np.abs(Vn - V)))
        V = Vn
        if res <= threshold:
            break
    Q = _backup(P, R, const, mask, V, beta)
    return V, _first_best(Q), res, it


def _solve_pi(g, Z, na, beta, threshold, max_iter):
    P, R, const, mask = _local_system(g, Z, na)
    nz = len(Z)
    idx = np.array([g.best[i] if g.best[i] in g.succ[i] else min(g.succ[i]) for i in Z])
    it = 0
    while True:
        it += 1
        rows = idx * nz + np.arange(nz)
        Pp = P[rows]
        c = R + beta * const[np.arange(nz), idx]
        if nz <= 2000:
            V = linalg.solve(np.eye(nz) - beta * Pp.toarray(), c)
        else:
            V = np.array([g.V[i] for i in Z])
            for _ in range(max_iter):
                Vn = c + beta * (Pp @ V)
                done = np.max(np.abs(Vn - V)) <= threshold
                V = Vn
                if done:
                    break
        Q = _backup(P, R, const, mask, V, beta)
        cur = Q[np.arange(nz), idx]
        best = Q.max(axis=1)
        improve = best > cur + 1e-10 * (1.0 + np.abs(cur))
        if not improve.any() or it >= max_iter:
            return V, idx, 0.0, it
        idx = np.where(improve, _first_best(Q), idx)


def lao_star(gen, cfg: SolverConfig, heuristic=None, subroutine: str = "vi",
             cap: int = DEFAULT_ESTATE_CAP) -> LaoResult:
    """Search from ``gen.initial()``; ``heuristic`` is a number or ``key -> bound``."""
    if subroutine not in ("vi", "pi"):
        raise ValueError("subroutine must be 'vi' or 'pi'")
    if heuristic is None:
        spec = getattr(gen, "spec", None)
        if spec is None:
            raise ValueError("no heuristic given and the generator carries no reward spec")
        heuristic = default_heuristic(spec, cfg.discount)
    h = heuristic if callable(heuristic) else (lambda _key, v=float(heuristic): v)
    solve = _solve_vi if subroutine == "vi" else _solve_pi
    na = len(gen.actions)
    beta = cfg.discount
    g = _Graph(gen, h, cap)
    start = g.node(gen.initial())
    iterations = 0
    converged = False
    while iterations < cfg.max_iterations:
        iterations += 1
        Z, tips = g.solution_graph(start)
        if tips:
            for i in tips:
                g.expand(i)
            g.propagate_dead([j for i in tips for dist in g.succ[i].values()
                              for j, _ in dist if g.dead[j]])
            Z, _ = g.solution_graph(start)
        if g.dead[start]:
            raise InfeasibleError("control knowledge rules out every behaviour from the start state")
        Z = [i for i in Z if not g.dead[i] and g.succ[i]]
        if not Z:
            break
        V, pol, res, _ = solve(g, Z, na, beta, cfg.threshold, cfg.max_iterations)
        changed = False
        for n, i in enumerate(Z):
            g.V[i] = float(V[n])
            k = int(pol[n])
            if g.best[i] != k:
                g.best[i] = k
                changed = True
        if not tips and not changed:
            # convergence check: value iteration over the final solution graph
            V, pol, res, _ = _solve_vi(g, Z, na, beta, cfg.threshold, cfg.max_iterations)
            moved = False
            for n, i in enumerate(Z):
                g.V[i] = float(V[n])
                if g.best[i] != int(pol[n]):
                    g.best[i] = int(pol[n])
                    moved = True
            _, tips_after = g.solution_graph(start)
            if not moved and not tips_after:
                converged = True
                break
    expanded = sum(1 for s in g.succ if s is not None)
    policy = {g.keys[i]: gen.actions[g.best[i]] for i in range(len(g.keys))
              if g.succ[i] is not None and g.best[i] >= 0 and not g.dead[i]}
    values = {g.keys[i]: g.V[i] for i in range(len(g.keys))}
    return LaoResult(g.V[start], values, policy, expanded, len(g.keys), iterations, converged,
                     list(g.keys))
