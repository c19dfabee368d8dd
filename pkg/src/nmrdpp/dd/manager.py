"""Reduced ordered decision diagrams with real-valued terminals.

A :class:`Manager` owns a fixed variable order, a unique table and an
operation cache. Nodes are small integers; :class:`Diagram` wraps a node id
together with its manager so diagrams can be combined with ordinary
operators. Boolean functions are diagrams whose terminals are 0 and 1.

Terminal values are compared exactly, so canonicity never depends on a
tolerance: two diagrams denote the same function iff their roots are equal.
"""
from __future__ import annotations

import math
import operator
from typing import Iterable, Mapping

from ..errors import NodeBudgetExceeded

_TERMINAL = 1 << 30

# binary terminal operations; commutative ones get a normalised cache key
_BINARY = {
    "plus": operator.add,
    "minus": operator.sub,
    "times": operator.mul,
    "max": max,
    "min": min,
    "and": lambda a, b: 1.0 if (a and b) else 0.0,
    "or": lambda a, b: 1.0 if (a or b) else 0.0,
    "absdiff": lambda a, b: abs(a - b),
    "gt": lambda a, b: 1.0 if a > b else 0.0,
    "ge": lambda a, b: 1.0 if a >= b else 0.0,
    "eq": lambda a, b: 1.0 if a == b else 0.0,
}
_COMMUTATIVE = {"plus", "times", "max", "min", "and", "or", "absdiff", "eq"}


class Manager:
    """Single-owner arena of diagram nodes over a fixed variable order."""

    def __init__(self, variables: Iterable[str], node_budget: int | None = None):
        self.vars: list[str] = list(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable in order")
        self.level = {v: i for i, v in enumerate(self.vars)}
        self.node_budget = node_budget
        # node arrays: level, high child, low child, terminal value
        self._lvl: list[int] = []
        self._hi: list[int] = []
        self._lo: list[int] = []
        self._val: list[float | None] = []
        self._unique: dict = {}
        self._consts: dict = {}
        self._cache: dict = {}
        self.zero = self._const(0.0)
        self.one = self._const(1.0)

    # -- construction -------------------------------------------------------

    def __len__(self):
        return len(self._lvl)

    def _new(self, lvl, hi, lo, val):
        if self.node_budget is not None and len(self._lvl) >= self.node_budget:
            raise NodeBudgetExceeded(
                f"decision diagram node budget of {self.node_budget} exhausted", len(self._lvl))
        self._lvl.append(lvl)
        self._hi.append(hi)
        self._lo.append(lo)
        self._val.append(val)
        return len(self._lvl) - 1

    def _const(self, v: float) -> int:
        v = float(v)
        if v == 0.0:
            v = 0.0  # fold -0.0
        if math.isnan(v):
            raise ValueError("NaN terminal")
        n = self._consts.get(v)
        if n is None:
            n = self._new(_TERMINAL, -1, -1, v)
            self._consts[v] = n
        return n

    def _mk(self, lvl: int, hi: int, lo: int) -> int:
        if hi == lo:
            return hi
        key = (lvl, hi, lo)
        n = self._unique.get(key)
        if n is None:
            n = self._new(lvl, hi, lo, None)
            self._unique[key] = n
        return n

    def _level_of(self, name):
        try:
            return self.level[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def const(self, v: float) -> Diagram:
        return Diagram(self, self._const(v))

    def var(self, name: str) -> Diagram:
        return Diagram(self, self._mk(self._level_of(name), self.one, self.zero))

    def cube(self, assignment: Mapping[str, bool]) -> Diagram:
        """Characteristic function of a (partial) assignment."""
        node = self.one
        for name in sorted(assignment, key=self._level_of, reverse=True):
            lvl = self._level_of(name)
            node = self._mk(lvl, node, self.zero) if assignment[name] else self._mk(lvl, self.zero, node)
        return Diagram(self, node)

    def wrap(self, node: int) -> Diagram:
        return Diagram(self, node)

    def clear_cache(self):
        self._cache.clear()

    # -- core recursion -----------------------------------------------------

    def is_terminal(self, n: int) -> bool:
        return self._lvl[n] == _TERMINAL

    def value(self, n: int) -> float:
        return self._val[n]

    def apply(self, op: str, f: int, g: int) -> int:
        fn = _BINARY[op]
        comm = op in _COMMUTATIVE
        lvl, hi, lo, val = self._lvl, self._hi, self._lo, self._val
        cache = self._cache
        zero, one = self.zero, self.one

        def rec(f, g):
            if comm and f > g:
                f, g = g, f
            lf, lg = lvl[f], lvl[g]
            if lf == _TERMINAL and lg == _TERMINAL:
                return self._const(fn(val[f], val[g]))
            # cheap algebraic shortcuts
            if op == "times":
                if f == zero or g == zero:
                    return zero
                if f == one:
                    return g
                if g == one:
                    return f
            elif op == "plus":
                if f == zero:
                    return g
                if g == zero:
                    return f
            elif op in ("max", "min") and f == g:
                return f
            elif op == "and":
                if f == zero or g == zero:
                    return zero
            elif op == "or":
                if f == one or g == one:
                    return one
            key = (op, f, g)
            r = cache.get(key)
            if r is not None:
                return r
            top = lf if lf < lg else lg
            if lf == top:
                fh, fl = hi[f], lo[f]
            else:
                fh = fl = f
            if lg == top:
                gh, gl = hi[g], lo[g]
            else:
                gh = gl = g
            r = self._mk(top, rec(fh, gh), rec(fl, gl))
            cache[key] = r
            return r

        return rec(f, g)

    def map_leaves(self, f: int, fn, key) -> int:
        """Apply a unary function to every terminal; ``key`` names it for caching."""
        lvl, hi, lo, val = self._lvl, self._hi, self._lo, self._val
        cache = self._cache

        def rec(n):
            if lvl[n] == _TERMINAL:
                return self._const(fn(val[n]))
            ck = ("map", key, n)
            r = cache.get(ck)
            if r is None:
                r = self._mk(lvl[n], rec(hi[n]), rec(lo[n]))
                cache[ck] = r
            return r

        return rec(f)

    def restrict(self, f: int, name: str, value: bool) -> int:
        target = self._level_of(name)
        lvl, hi, lo = self._lvl, self._hi, self._lo
        memo: dict = {}

        def rec(n):
            ln = lvl[n]
            if ln > target:
                return n
            if ln == target:
                return hi[n] if value else lo[n]
            r = memo.get(n)
            if r is None:
                r = self._mk(ln, rec(hi[n]), rec(lo[n]))
                memo[n] = r
            return r

        return rec(f)

    def ite(self, c: int, t: int, e: int) -> int:
        """``c ? t : e`` for a 0/1 diagram ``c``."""
        if c == self.one:
            return t
        if c == self.zero:
            return e
        if t == e:
            return t
        lc = self._lvl[c]
        if (lc < self._lvl[t] and lc < self._lvl[e]
                and self._hi[c] == self.one and self._lo[c] == self.zero):
            return self._mk(lc, t, e)
        nc = self.apply("minus", self.one, c)
        return self.apply("plus", self.apply("times", c, t), self.apply("times", nc, e))

    def rename(self, f: int, mapping: Mapping[str, str]) -> int:
        """Substitute variables by variables (e.g. unprimed to primed)."""
        lmap = {self._level_of(a): self._level_of(b) for a, b in mapping.items()}
        lvl, hi, lo = self._lvl, self._hi, self._lo
        memo: dict = {}

        def rec(n):
            if lvl[n] == _TERMINAL:
                return n
            r = memo.get(n)
            if r is None:
                new = lmap.get(lvl[n], lvl[n])
                v = self._mk(new, self.one, self.zero)
                r = self.ite(v, rec(hi[n]), rec(lo[n]))
                memo[n] = r
            return r

        return rec(f)

    def abstract(self, op: str, f: int, names: Iterable[str]) -> int:
        """Combine both cofactors with ``op`` for each variable in ``names``."""
        for name in sorted(names, key=self._level_of):
            f = self.apply(op, self.restrict(f, name, True), self.restrict(f, name, False))
        return f

    # -- inspection ---------------------------------------------------------

    def nodes_of(self, f: int) -> list[int]:
        seen = {f}
        stack = [f]
        while stack:
            n = stack.pop()
            if self._lvl[n] != _TERMINAL:
                for c in (self._hi[n], self._lo[n]):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return sorted(seen)

    def evaluate(self, f: int, assignment: Mapping[str, bool]) -> float:
        n = f
        while self._lvl[n] != _TERMINAL:
            name = self.vars[self._lvl[n]]
            try:
                b = assignment[name]
            except KeyError:
                raise ValueError(f"assignment does not bind {name!r}") from None
            n = self._hi[n] if b else self._lo[n]
        return self._val[n]


class Diagram:
    """Immutable handle on a node of a :class:`Manager`."""

    __slots__ = ("mgr", "node")

    def __init__(self, mgr: Manager, node: int):
        self.mgr = mgr
        self.node = node

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.mgr is other.mgr and self.node == other.node

    def __hash__(self):
        return hash((id(self.mgr), self.node))

    def __repr__(self):
        if self.is_const:
            return f"Diagram(const {self.value})"
        return f"Diagram(root={self.node}, size={self.size})"

    def _lift(self, other):
        if isinstance(other, Diagram):
            if other.mgr is not self.mgr:
                raise ValueError("diagrams belong to different managers")
            return other.node
        return self.mgr._const(other)

    def _bin(self, op, other):
        return Diagram(self.mgr, self.mgr.apply(op, self.node, self._lift(other)))

    def __add__(self, o):
        return self._bin("plus", o)

    __radd__ = __add__

    def __sub__(self, o):
        return self._bin("minus", o)

    def __rsub__(self, o):
        return Diagram(self.mgr, self.mgr.apply("minus", self._lift(o), self.node))

    def __mul__(self, o):
        return self._bin("times", o)

    __rmul__ = __mul__

    def __and__(self, o):
        return self._bin("and", o)

    def __or__(self, o):
        return self._bin("or", o)

    def __invert__(self):
        return Diagram(self.mgr, self.mgr.apply("minus", self.mgr.one, self.node))

    def __neg__(self):
        return Diagram(self.mgr, self.mgr.map_leaves(self.node, operator.neg, "neg"))

    def apply(self, op: str, other) -> Diagram:
        return self._bin(op, other)

    def maximum(self, o):
        return self._bin("max", o)

    def minimum(self, o):
        return self._bin("min", o)

    def ite(self, then, other) -> Diagram:
        return Diagram(self.mgr, self.mgr.ite(self.node, self._lift(then), self._lift(other)))

    def restrict(self, name: str, value: bool) -> Diagram:
        return Diagram(self.mgr, self.mgr.restrict(self.node, name, value))

    def sum_over(self, names) -> Diagram:
        return Diagram(self.mgr, self.mgr.abstract("plus", self.node, names))

    def max_over(self, names) -> Diagram:
        return Diagram(self.mgr, self.mgr.abstract("max", self.node, names))

    def rename(self, mapping) -> Diagram:
        return Diagram(self.mgr, self.mgr.rename(self.node, mapping))

    def evaluate(self, assignment) -> float:
        return self.mgr.evaluate(self.node, assignment)

    @property
    def is_const(self) -> bool:
        return self.mgr.is_terminal(self.node)

    @property
    def value(self) -> float:
        if not self.is_const:
            raise ValueError("diagram is not a constant")
        return self.mgr.value(self.node)

    @property
    def size(self) -> int:
        """Number of distinct nodes (internal and terminal) in the DAG."""
        return len(self.mgr.nodes_of(self.node))

    @property
    def internal_size(self) -> int:
        return sum(1 for n in self.mgr.nodes_of(self.node) if not self.mgr.is_terminal(n))

    def leaves(self) -> list[float]:
        m = self.mgr
        return sorted(m.value(n) for n in m.nodes_of(self.node) if m.is_terminal(n))

    def max_leaf(self) -> float:
        return self.leaves()[-1]

    def min_leaf(self) -> float:
        return self.leaves()[0]

    def count(self, names) -> int:
        """Assignments to ``names`` (a superset of the support) with a non-zero leaf."""
        m = self.mgr
        levels = sorted(m._level_of(v) for v in names)
        pos = {lvl: k for k, lvl in enumerate(levels)}
        memo: dict = {}

        def rec(n, k):
            # assignments to levels[k:] reaching a non-zero leaf from node n
            key = (n, k)
            if key in memo:
                return memo[key]
            if m.is_terminal(n):
                out = (1 << (len(levels) - k)) if m.value(n) != 0 else 0
            else:
                at = pos.get(m._lvl[n])
                if at is None:
                    raise ValueError(f"diagram tests {m.vars[m._lvl[n]]!r}, not among names")
                skipped = at - k
                out = (rec(m._hi[n], at + 1) + rec(m._lo[n], at + 1)) << skipped
            memo[key] = out
            return out

        return rec(self.node, 0)

    def support(self) -> set[str]:
        m = self.mgr
        return {m.vars[m._lvl[n]] for n in m.nodes_of(self.node) if not m.is_terminal(n)}

    def high(self) -> Diagram:
        return Diagram(self.mgr, self.mgr._hi[self.node])

    def low(self) -> Diagram:
        return Diagram(self.mgr, self.mgr._lo[self.node])

    @property
    def top_var(self) -> str | None:
        if self.is_const:
            return None
        return self.mgr.vars[self.mgr._lvl[self.node]]

    def to_dot(self, name: str = "dd") -> str:
        """DOT text: one line per node, solid edges for high, dashed for low."""
        m = self.mgr
        nodes = m.nodes_of(self.node)
        lines = [f"digraph {name} {{"]
        for n in nodes:
            if m.is_terminal(n):
                lines.append(f'  n{n} [shape=box, label="{m.value(n)!r}"];')
            else:
                lines.append(f'  n{n} [label="{m.vars[m._lvl[n]]}"];')
        for n in nodes:
            if not m.is_terminal(n):
                lines.append(f"  n{n} -> n{m._hi[n]};")
                lines.append(f"  n{n} -> n{m._lo[n]} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"
