"""Hand-coded benchmark families and a seeded random-domain generator.

Propositions are ``p1 .. pn`` and the initial state has all of them false.
"""
from __future__ import annotations

import random

from .model import FactoredNMRDP, Tree

FAMILIES = ("spudd-linear", "spudd-expon", "on-off", "complete", "random")


def _props(n):
    return tuple(f"p{i}" for i in range(1, n + 1))


def spudd_linear(n: int, discount: float = 0.9) -> FactoredNMRDP:
    """Action ``ai`` sets ``pi`` and clears every ``pj`` with ``j < i``."""
    props = _props(n)
    actions = {}
    for i in range(1, n + 1):
        eff: dict[str, Tree] = {f"p{j}": 0.0 for j in range(1, i)}
        eff[f"p{i}"] = 1.0
        actions[f"a{i}"] = eff
    return FactoredNMRDP(props, actions, 0, discount, None, f"spudd-linear-{n}")


def spudd_expon(n: int, discount: float = 0.9) -> FactoredNMRDP:
    """Action ``ai`` sets ``pi`` iff all lower propositions hold, and clears them."""
    props = _props(n)
    actions = {}
    for i in range(1, n + 1):
        guard: Tree = 1.0
        for j in range(i - 1, 0, -1):
            guard = (f"p{j}", guard, 0.0)
        eff: dict[str, Tree] = {f"p{j}": 0.0 for j in range(1, i)}
        eff[f"p{i}"] = guard
        actions[f"a{i}"] = eff
    return FactoredNMRDP(props, actions, 0, discount, None, f"spudd-expon-{n}")


def on_off(n: int, success: float = 0.5, discount: float = 0.9) -> FactoredNMRDP:
    """``on_pi`` makes a false ``pi`` true with probability ``success``; ``off_pi`` mirrors it."""
    props = _props(n)
    actions = {}
    for p in props:
        actions[f"on_{p}"] = {p: (p, 1.0, success)}
        actions[f"off_{p}"] = {p: (p, 1.0 - success, 0.0)}
    return FactoredNMRDP(props, actions, 0, discount, None, f"on-off-{n}")


def complete(n: int, discount: float = 0.9) -> FactoredNMRDP:
    """``ai`` makes ``pi`` true with probability i/(n+1), every other proposition with 0.5."""
    props = _props(n)
    actions = {}
    for i in range(1, n + 1):
        actions[f"a{i}"] = {p: (i / (n + 1) if k == i else 0.5) for k, p in enumerate(props, 1)}
    return FactoredNMRDP(props, actions, 0, discount, None, f"complete-{n}")


def random_domain(n: int, structure: float = 0.5, uncertainty: float = 0.5,
                  seed: int = 0, discount: float = 0.9,
                  n_actions: int | None = None) -> FactoredNMRDP:
    """Seeded random dynamics.

    Each per-proposition tree is grown top-down: a node splits on a random
    not-yet-tested proposition with probability ``structure``. A leaf is 0 or
    1 with probability ``1 - uncertainty`` and uniform in [0, 1] otherwise
    (rounded to three decimals so the text form is exact).
    """
    if not (0.0 <= structure <= 1.0 and 0.0 <= uncertainty <= 1.0):
        raise ValueError("structure and uncertainty must lie in [0, 1]")
    rng = random.Random(seed)
    props = _props(n)

    def leaf():
        if rng.random() < uncertainty:
            return round(rng.random(), 3)
        return float(rng.random() < 0.5)

    def grow(avail):
        if avail and rng.random() < structure:
            v = rng.choice(avail)
            rest = [p for p in avail if p != v]
            return (v, grow(rest), grow(rest))
        return leaf()

    actions = {}
    for k in range(1, (n_actions or n) + 1):
        actions[f"a{k}"] = {p: grow(list(props)) for p in props}
    name = f"random-{n}-s{structure}-u{uncertainty}-seed{seed}"
    return FactoredNMRDP(props, actions, 0, discount, None, name)


def gen_builtin(family: str, n: int, discount: float = 0.9, **params) -> FactoredNMRDP:
    if n < 1:
        raise ValueError("n must be at least 1")
    if family == "spudd-linear":
        return spudd_linear(n, discount)
    if family == "spudd-expon":
        return spudd_expon(n, discount)
    if family == "on-off":
        return on_off(n, params.get("success", 0.5), discount)
    if family == "complete":
        return complete(n, discount)
    if family == "random":
        return random_domain(n, params.get("structure", 0.5), params.get("uncertainty", 0.5),
                             params.get("seed", 0), discount)
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
