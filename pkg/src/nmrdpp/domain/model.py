"""Factored NMRDPs: propositional states, per-proposition stochastic effects."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from ..errors import ExplicitCapExceeded
from ..logic.rewards import RewardSpec

# A tree is either a leaf probability or (proposition, then-tree, else-tree),
# the then-branch being taken when the proposition is currently true.
Tree = Union[float, tuple]

DEFAULT_EXPLICIT_CAP = 20


def keep(prop: str) -> Tree:
    """Tree that leaves ``prop`` unchanged."""
    return (prop, 1.0, 0.0)


def tree_props(t: Tree) -> set[str]:
    if isinstance(t, tuple):
        return {t[0]} | tree_props(t[1]) | tree_props(t[2])
    return set()


def tree_leaves(t: Tree) -> list[float]:
    if isinstance(t, tuple):
        return tree_leaves(t[1]) + tree_leaves(t[2])
    return [t]


def format_tree(t: Tree) -> str:
    if isinstance(t, tuple):
        return f"({t[0]} {format_tree(t[1])} {format_tree(t[2])})"
    return f"({t!r})"


@dataclass
class FactoredNMRDP:
    """Propositional decision process with a (possibly) non-Markovian reward.

    States are ints: bit ``i`` holds proposition ``propositions[i]``.
    ``actions`` maps each action name (in declaration order) to one tree per
    proposition giving the probability that the proposition is true next.
    Effects on different propositions are independent.
    """

    propositions: tuple[str, ...]
    actions: dict[str, dict[str, Tree]]
    initial: int = 0
    discount: float = 0.9
    rewards: RewardSpec | None = None
    name: str = ""
    _succ_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _val_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.propositions = tuple(self.propositions)
        if len(set(self.propositions)) != len(self.propositions):
            raise ValueError("duplicate proposition")
        self.index = {p: i for i, p in enumerate(self.propositions)}
        if not 0.0 < self.discount < 1.0:
            raise ValueError(f"discount must lie strictly between 0 and 1, got {self.discount}")
        full = {}
        for a, effects in self.actions.items():
            eff = {}
            for p, t in effects.items():
                if p not in self.index:
                    raise ValueError(f"action {a!r} affects unknown proposition {p!r}")
                bad = tree_props(t) - set(self.index)
                if bad:
                    raise ValueError(f"action {a!r} tests unknown proposition {sorted(bad)[0]!r}")
                for leaf in tree_leaves(t):
                    if not 0.0 <= leaf <= 1.0:
                        raise ValueError(f"probability {leaf} outside [0, 1] in action {a!r}")
                eff[p] = t
            for p in self.propositions:
                eff.setdefault(p, keep(p))
            full[a] = {p: eff[p] for p in self.propositions}
        self.actions = full
        if not 0 <= self.initial < (1 << len(self.propositions)):
            raise ValueError("initial state out of range")

    # -- states -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.propositions)

    @property
    def action_names(self) -> list[str]:
        return list(self.actions)

    def valuation(self, s: int) -> dict[str, bool]:
        v = self._val_cache.get(s)
        if v is None:
            v = {p: bool(s >> i & 1) for i, p in enumerate(self.propositions)}
            self._val_cache[s] = v
        return v

    def state_of(self, assignment: Mapping[str, bool]) -> int:
        s = 0
        for p, i in self.index.items():
            if assignment.get(p, False):
                s |= 1 << i
        return s

    def state_bits(self, s: int) -> str:
        return "".join("1" if s >> i & 1 else "0" for i in range(self.n))

    def enumerate_states(self, cap: int = DEFAULT_EXPLICIT_CAP) -> list[int]:
        if self.n > cap:
            raise ExplicitCapExceeded(
                f"{self.n} propositions exceed the explicit enumeration cap of {cap}", self.n)
        return list(range(1 << self.n))

    # -- dynamics -----------------------------------------------------------

    def prob_true(self, t: Tree, s: int) -> float:
        while isinstance(t, tuple):
            t = t[1] if s >> self.index[t[0]] & 1 else t[2]
        return t

    def successors(self, s: int, a: str) -> list[tuple[int, float]]:
        """Non-zero-probability successors of ``s`` under ``a``, in state order."""
        key = (s, a)
        out = self._succ_cache.get(key)
        if out is not None:
            return out
        try:
            effects = self.actions[a]
        except KeyError:
            raise KeyError(f"unknown action {a!r}") from None
        dist = {0: 1.0}
        for i, p in enumerate(self.propositions):
            q = self.prob_true(effects[p], s)
            bit = 1 << i
            if q >= 1.0:
                dist = {t | bit: w for t, w in dist.items()}
            elif q <= 0.0:
                continue
            else:
                nd = {}
                for t, w in dist.items():
                    nd[t | bit] = w * q
                    nd[t] = w * (1.0 - q)
                dist = nd
        out = sorted(dist.items())
        self._succ_cache[key] = out
        return out

    def is_feasible(self, trace: Iterable[int]) -> bool:
        """Every consecutive pair is linked by some action with non-zero probability."""
        trace = list(trace)
        for s, t in zip(trace, trace[1:]):
            if not any(t == u for a in self.actions for u, _ in self.successors(s, a)):
                return False
        return True

    def reachable_states(self) -> list[int]:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            s = stack.pop()
            for a in self.actions:
                for t, _ in self.successors(s, a):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        return sorted(seen)

    # -- derived domains ----------------------------------------------------

    def with_rewards(self, rewards: RewardSpec | None) -> FactoredNMRDP:
        return FactoredNMRDP(self.propositions, self.actions, self.initial,
                             self.discount, rewards, self.name)

    def with_discount(self, beta: float) -> FactoredNMRDP:
        return FactoredNMRDP(self.propositions, self.actions, self.initial,
                             beta, self.rewards, self.name)

    def add_inert_propositions(self, names: Iterable[str]) -> FactoredNMRDP:
        """Append propositions that start false and that no action changes."""
        names = list(names)
        props = self.propositions + tuple(names)
        actions = {a: dict(eff) for a, eff in self.actions.items()}
        for eff in actions.values():
            for p in names:
                eff[p] = keep(p)
        return FactoredNMRDP(props, actions, self.initial, self.discount,
                             self.rewards, self.name)

    def dump(self) -> str:
        """Domain-file text; parses back to an equal domain."""
        lines = [f"variables ({' '.join(self.propositions)})"]
        for a, eff in self.actions.items():
            body = [f"  {p} {format_tree(eff[p])}" for p in self.propositions if eff[p] != keep(p)]
            if not body and self.propositions:
                p = self.propositions[0]
                body = [f"  {p} {format_tree(eff[p])}"]
            lines += [f"action {a}", *body, "endaction"]
        lines.append(f"discount {self.discount!r}")
        if self.initial:
            lits = [p if self.initial >> i & 1 else "~" + p for i, p in enumerate(self.propositions)]
            lines.append(f"init ({' '.join(lits)})")
        return "\n".join(lines) + "\n"
