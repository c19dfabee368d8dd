"""Value and policy iteration over explicit expanded MDPs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ..errors import ConfigError
from ..translate.xmdp import XMDP

DIRECT_SOLVE_LIMIT = 2000


@dataclass(frozen=True)
class SolverConfig:
    discount: float = 0.9
    epsilon: float = 1e-6
    max_iterations: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ConfigError(f"discount must lie strictly between 0 and 1, got {self.discount}")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")

    @property
    def threshold(self) -> float:
        """Residual below which the value is within ``epsilon`` of optimal."""
        return self.epsilon * (1.0 - self.discount) / self.discount


@dataclass
class Solution:
    values: np.ndarray
    policy: list[str]
    iterations: int
    converged: bool = True
    residuals: list[float] = field(default_factory=list)

    @property
    def v0(self) -> float:
        return float(self.values[0])


def _setup(m: XMDP):
    P, R, mask = m.matrices()
    if len(m) and not mask.any(axis=1).all():
        bad = int(np.flatnonzero(~mask.any(axis=1))[0])
        raise ConfigError(f"e-state {bad} offers no action; prune dead e-states first")
    return P, R, mask


def _q_values(P, R, mask, V, beta):
    n, na = mask.shape
    Q = R[:, None] + beta * (P @ V).reshape(na, n).T
    Q[~mask] = -np.inf
    return Q


def greedy(Q: np.ndarray, actions: list[str]) -> list[str]:
    """Greedy actions; near-ties go to the earliest declared action."""
    best = Q.max(axis=1)
    tol = 1e-12 * (1.0 + np.abs(best))
    first = np.argmax(Q >= (best - tol)[:, None], axis=1)
    return [actions[k] for k in first]


def value_iteration(m: XMDP, cfg: SolverConfig | None = None) -> Solution:
    """Bellman backups from the pessimistic start ``min R / (1 - beta)``."""
    cfg = cfg or SolverConfig(m.discount)
    P, R, mask = _setup(m)
    beta = cfg.discount
    V = np.full(len(m), (R.min() if len(R) else 0.0) / (1.0 - beta))
    residuals = []
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        Vn = _q_values(P, R, mask, V, beta).max(axis=1)
        res = float(np.max(np.abs(Vn - V))) if len(V) else 0.0
        residuals.append(res)
        V = Vn
        if res <= cfg.threshold:
            converged = True
            break
    policy = greedy(_q_values(P, R, mask, V, beta), m.actions)
    return Solution(V, policy, it, converged, residuals)


def _policy_matrix(P, mask, policy_idx):
    n = mask.shape[0]
    rows = policy_idx * n + np.arange(n)
    return P[rows]


def _evaluate(Pp, R, beta, V0, threshold, max_iter):
    n = len(R)
    if n <= DIRECT_SOLVE_LIMIT:
        A = np.eye(n) - beta * Pp.toarray()
        return linalg.solve(A, R), 1
    V = V0.copy()
    for k in range(1, max_iter + 1):
        Vn = R + beta * (Pp @ V)
        if np.max(np.abs(Vn - V)) <= threshold:
            return Vn, k
        V = Vn
    return V, max_iter


def policy_value(m: XMDP, policy: list[str], cfg: SolverConfig | None = None) -> np.ndarray:
    """Exact value of a stationary policy over e-states."""
    cfg = cfg or SolverConfig(m.discount)
    P, R, mask = _setup(m)
    idx = np.array([m.actions.index(a) for a in policy])
    if not mask[np.arange(len(m)), idx].all():
        raise ConfigError("policy uses an action that is not allowed")
    V, _ = _evaluate(_policy_matrix(P, mask, idx), R, cfg.discount,
                     np.zeros(len(m)), cfg.threshold * 1e-3, cfg.max_iterations)
    return V


def policy_iteration(m: XMDP, cfg: SolverConfig | None = None) -> Solution:
    """Exact evaluation then greedy improvement; actions change only on strict gain."""
    cfg = cfg or SolverConfig(m.discount)
    P, R, mask = _setup(m)
    beta = cfg.discount
    n = len(m)
    idx = np.argmax(mask, axis=1)  # first allowed action
    V = np.zeros(n)
    it = 0
    while it < cfg.max_iterations:
        it += 1
        V, _ = _evaluate(_policy_matrix(P, mask, idx), R, beta, V, cfg.threshold, cfg.max_iterations)
        Q = _q_values(P, R, mask, V, beta)
        cur = Q[np.arange(n), idx]
        best = Q.max(axis=1)
        tol = 1e-10 * (1.0 + np.abs(cur))
        improve = best > cur + tol
        if not improve.any():
            return Solution(V, [m.actions[k] for k in idx], it, True)
        cand = np.argmax(Q >= (best - 1e-12 * (1.0 + np.abs(best)))[:, None], axis=1)
        idx = np.where(improve, cand, idx)
    return Solution(V, [m.actions[k] for k in idx], it, False)
