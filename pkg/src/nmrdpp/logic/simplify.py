"""Syntactic simplification of formulas.

Only sound local rewrites are applied: unit laws for the constants, double
negation, idempotence on syntactically equal children, and the analogous
unit laws of the temporal operators (``next true = true``,
``a wun true = true``, ``prv false = false`` ...). No attempt is made at
semantic canonisation.
"""
from __future__ import annotations

from .formula import (
    AND, ATOM, FALSE, FALSE_OP, NEXT, NOT, OR, PREV, SINCE, TRUE, TRUE_OP, WUNTIL,
    Formula, _mk, conj, disj,
)

_CACHE: dict = {}


def simplify(f: Formula) -> Formula:
    """Repeat a bottom-up rewriting pass until nothing changes."""
    out = _CACHE.get(f)
    if out is not None:
        return out
    cur = f
    while True:
        nxt = _pass(cur, {})
        if nxt is cur:
            break
        cur = nxt
    _CACHE[f] = cur
    _CACHE[cur] = cur
    return cur


def _pass(f: Formula, memo: dict) -> Formula:
    hit = memo.get(f)
    if hit is not None:
        return hit
    if not f.args:
        memo[f] = f
        return f
    args = tuple(_pass(a, memo) for a in f.args)
    out = _local(f.op, args)
    if out is None:
        out = f if args == f.args else _mk(f.op, args, f.name)
    memo[f] = out
    return out


def _local(op, args):
    if op == NOT:
        (a,) = args
        if a is TRUE:
            return FALSE
        if a is FALSE:
            return TRUE
        if a.op == NOT:
            return a.args[0]
        return None
    if op == AND:
        a, b = args
        if a is FALSE or b is FALSE:
            return FALSE
        if a is TRUE:
            return b
        if b is TRUE or a is b:
            return a
        return None
    if op == OR:
        a, b = args
        if a is TRUE or b is TRUE:
            return TRUE
        if a is FALSE:
            return b
        if b is FALSE or a is b:
            return a
        return None
    if op == NEXT:
        (a,) = args
        if a.op in (TRUE_OP, FALSE_OP):
            return a
        return None
    if op == WUNTIL:
        a, b = args
        if b is TRUE or a is TRUE:
            return TRUE
        if a is FALSE or a is b:
            return b
        return None
    if op == PREV:
        if args[0] is FALSE:
            return FALSE
        return None
    if op == SINCE:
        a, b = args
        if b is FALSE:
            return FALSE
        if b is TRUE:
            return TRUE
        if a is FALSE or a is b:
            return b
        return None
    return None


def canonical(f: Formula) -> Formula:
    """Simplify, then flatten, sort and de-duplicate and/or chains.

    Associativity and commutativity are sound for both dialects, so the result
    is equivalent to ``f``; it is used for e-state deduplication keys.
    """
    return _canon(simplify(f), {})


def _canon(f: Formula, memo: dict) -> Formula:
    hit = memo.get(f)
    if hit is not None:
        return hit
    if f.op in (AND, OR):
        parts: list[Formula] = []
        _flatten(f, f.op, parts)
        parts = [_canon(p, memo) for p in parts]
        flat: list[Formula] = []
        for p in parts:
            if p.op == f.op:
                _flatten(p, f.op, flat)
            else:
                flat.append(p)
        unit, zero = (TRUE, FALSE) if f.op == AND else (FALSE, TRUE)
        if zero in flat:
            out = zero
        else:
            uniq = sorted({p for p in flat if p is not unit}, key=str)
            if not uniq:
                out = unit
            else:
                join = conj if f.op == AND else disj
                out = uniq[-1]
                for p in reversed(uniq[:-1]):
                    out = join(p, out)
    elif f.args:
        args = tuple(_canon(a, memo) for a in f.args)
        out = simplify(_mk(f.op, args, f.name)) if args != f.args else f
        if out.op in (AND, OR):
            out = _canon(out, memo)
    else:
        out = f
    memo[f] = out
    return out


def _flatten(f, op, out):
    if f.op == op:
        for a in f.args:
            _flatten(a, op, out)
    else:
        out.append(f)



def boolean_normal_form(f: Formula, monotone: bool = False) -> Formula:
    """Canonical form of ``f`` as a boolean function of its boolean-level leaves.

    Leaves are the atoms, ``$`` and the maximal temporal subformulas. Two
    formulas that agree as boolean functions of the same leaves map to the
    same formula, so repeated regression or progression cannot grow without
    bound. The form is an if-then-else chain over the leaves sorted by text.
    With ``monotone`` (negation normal form), non-atom leaves are never
    negated: ``f`` is rebuilt as ``lo | (v & hi)``, which is equivalent
    because ``f`` is monotone in such leaves.
    """
    leaves: dict = {}
    _leaves(f, leaves)
    if not leaves:
        return simplify(f)
    order = sorted(leaves, key=str)
    rank = {v: i for i, v in enumerate(order)}
    bdd = _Bdd(len(order))
    root = bdd.build(f, rank, {})
    return bdd.rebuild(root, order, monotone, {})


def _leaves(f: Formula, out: dict):
    if f.op in (AND, OR, NOT):
        for a in f.args:
            _leaves(a, out)
    elif not f.is_const:
        out[f] = None


class _Bdd:
    """Small reduced ordered decision diagram over leaf indices 0..n-1."""

    def __init__(self, n: int):
        self.n = n
        self.table: dict = {}
        self.nodes: list = [None, None]  # 0 false, 1 true
        self.memo: dict = {}

    def mk(self, lvl, hi, lo):
        if hi == lo:
            return hi
        key = (lvl, hi, lo)
        node = self.table.get(key)
        if node is None:
            node = len(self.nodes)
            self.nodes.append(key)
            self.table[key] = node
        return node

    def lvl(self, u):
        return self.n if u < 2 else self.nodes[u][0]

    def apply(self, op, u, v):
        if op == AND:
            if u == 0 or v == 0:
                return 0
            if u == 1:
                return v
            if v == 1 or u == v:
                return u
        else:
            if u == 1 or v == 1:
                return 1
            if u == 0:
                return v
            if v == 0 or u == v:
                return u
        if u > v:
            u, v = v, u
        key = (op, u, v)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        lu, lv = self.lvl(u), self.lvl(v)
        top = min(lu, lv)
        uh, ul = self.nodes[u][1:] if lu == top else (u, u)
        vh, vl = self.nodes[v][1:] if lv == top else (v, v)
        out = self.mk(top, self.apply(op, uh, vh), self.apply(op, ul, vl))
        self.memo[key] = out
        return out

    def negate(self, u):
        if u < 2:
            return 1 - u
        key = (NOT, u)
        hit = self.memo.get(key)
        if hit is None:
            lvl, hi, lo = self.nodes[u]
            hit = self.memo[key] = self.mk(lvl, self.negate(hi), self.negate(lo))
        return hit

    def build(self, f, rank, memo):
        hit = memo.get(f)
        if hit is not None:
            return hit
        if f is TRUE:
            out = 1
        elif f is FALSE:
            out = 0
        elif f.op == NOT:
            out = self.negate(self.build(f.args[0], rank, memo))
        elif f.op in (AND, OR):
            out = self.apply(f.op, self.build(f.args[0], rank, memo), self.build(f.args[1], rank, memo))
        else:
            out = self.mk(rank[f], 1, 0)
        memo[f] = out
        return out

    def rebuild(self, u, order, monotone, memo):
        if u < 2:
            return TRUE if u else FALSE
        hit = memo.get(u)
        if hit is not None:
            return hit
        lvl, hi, lo = self.nodes[u]
        v = order[lvl]
        h = self.rebuild(hi, order, monotone, memo)
        g = self.rebuild(lo, order, monotone, memo)
        if monotone and v.op != ATOM:
            # g implies h here, so f = g | (v & h)
            body = v if h is TRUE else conj(v, h)
            out = body if g is FALSE else disj(g, body)
        elif h is TRUE and g is FALSE:
            out = v
        elif h is FALSE and g is TRUE:
            out = _mk(NOT, (v,), None)
        elif h is TRUE:
            out = disj(v, g)
        elif g is FALSE:
            out = conj(v, h)
        elif h is FALSE:
            out = conj(_mk(NOT, (v,), None), g)
        elif g is TRUE:
            out = disj(_mk(NOT, (v,), None), h)
        else:
            out = disj(conj(v, h), conj(_mk(NOT, (v,), None), g))
        memo[u] = out
        return out
