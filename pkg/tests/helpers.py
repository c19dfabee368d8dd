"""Shared oracles and generators for the test-suite."""
from __future__ import annotations

import itertools
import random

from nmrdpp.logic import formula as F
from nmrdpp.logic.fltl import progress, refuted
from nmrdpp.logic.simplify import simplify
from nmrdpp.logic.pltl import (
    LiteralSet, TraceEvaluator, entails, evaluate_pltl, regress, subformula_closure,
)


def valuations(props):
    """Every total assignment over ``props``."""
    for bits in itertools.product((False, True), repeat=len(props)):
        yield dict(zip(props, bits))


def traces(props, max_len):
    """Every non-empty sequence of valuations up to ``max_len``."""
    vals = list(valuations(props))
    for k in range(1, max_len + 1):
        yield from itertools.product(vals, repeat=k)


# -- random formula pools -------------------------------------------------------

def random_pltl(rng: random.Random, props, depth: int) -> F.Formula:
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.1:
            return F.const(rng.random() < 0.5)
        return F.atom(rng.choice(props))
    op = rng.choice(("not", "and", "or", "prv", "snc", "snc", "prv"))
    sub = lambda: random_pltl(rng, props, depth - 1)  # noqa: E731
    if op == "not":
        return F.neg(sub())
    if op == "and":
        return F.conj(sub(), sub())
    if op == "or":
        return F.disj(sub(), sub())
    if op == "prv":
        return F.prev(sub())
    return F.since(sub(), sub())


def random_fltl(rng: random.Random, props, depth: int, dollar: bool = False) -> F.Formula:
    """Random negation-normal-form $FLTL formula."""
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if dollar and r < 0.2:
            return F.DOLLAR_F
        if r < 0.3:
            return F.const(rng.random() < 0.5)
        a = F.atom(rng.choice(props))
        return F.neg(a) if rng.random() < 0.5 else a
    op = rng.choice(("and", "or", "next", "wun", "wun"))
    sub = lambda: random_fltl(rng, props, depth - 1, dollar)  # noqa: E731
    if op == "and":
        return F.conj(sub(), sub())
    if op == "or":
        return F.disj(sub(), sub())
    if op == "next":
        return F.nxt(sub())
    return F.wuntil(sub(), sub())


def pltl_pool(props, depth, count, seed=0):
    rng = random.Random(seed)
    pool = dict.fromkeys(F.atom(p) for p in props)
    while len(pool) < count:
        pool.setdefault(random_pltl(rng, props, depth))
    return list(pool)


def fltl_pool(props, depth, count, seed=0, dollar=False):
    rng = random.Random(seed)
    pool: dict = {}
    while len(pool) < count:
        pool.setdefault(random_fltl(rng, props, depth, dollar))
    return list(pool)


# -- property checkers (return the first counterexample, or None) ----------------

def regression_counterexample(formulas, props, max_len):
    """Search for phi, trace with eval(phi, G) != eval(Reg(phi, last G), G minus last)."""
    vals = list(valuations(props))
    ev = TraceEvaluator()
    regs = {}

    def reg(phi, k):
        key = (phi, k)
        if key not in regs:
            regs[key] = regress(phi, vals[k])
        return regs[key]

    def walk(path):
        for k, v in enumerate(vals):
            ev.push(v)
            path.append(k)
            if len(path) >= 2:
                i = len(path) - 1
                for phi in formulas:
                    if ev.holds(phi, i) != ev.holds(reg(phi, k), i - 1):
                        return phi, [vals[j] for j in path]
            if len(path) < max_len:
                bad = walk(path)
                if bad:
                    return bad
            path.pop()
            ev.pop()
        return None

    return walk([])


def progression_counterexample(formulas, props, max_len):
    """Folding progress on $-free formulas must never reward and hits false iff refuted."""
    for phi in formulas:
        for tr in traces(props, max_len):
            cur = phi
            for v in tr:
                cur, hit = progress(cur, v)
                if hit:
                    return phi, tr, "rewarded"
            if (cur is F.FALSE) != refuted(phi, list(tr)):
                return phi, tr, f"progressed to {cur}"
    return None


def entailment_counterexample(formulas, props, max_len):
    """entails(Psi of G minus last, Reg(psi, last)) must equal eval(psi, G).

    Labels range over the closure of the simplified formulas, as in the
    translations.
    """
    closure = subformula_closure([simplify(f) for f in formulas])
    members = list(closure)
    dom = frozenset(members)
    for tr in traces(props, max_len):
        tr = list(tr)
        if len(tr) >= 1:
            truth = frozenset(f for f in members if evaluate_pltl(f, tr))
            psi = LiteralSet(dom, truth)
            for f in members:
                if entails(psi, f) != (f in truth):
                    return f, tr, "label"
        if len(tr) >= 2:
            before = frozenset(f for f in members if evaluate_pltl(f, tr[:-1]))
            psi = LiteralSet(dom, before)
            for f in members:
                if entails(psi, regress(f, tr[-1])) != evaluate_pltl(f, tr):
                    return f, tr, "regression"
    return None


# -- decision diagram audit -----------------------------------------------------

def audit_diagram(d) -> list[str]:
    """Problems with ordering or reduction in the DAG under ``d``."""
    m = d.mgr
    problems = []
    seen = {}
    for n in m.nodes_of(d.node):
        if m.is_terminal(n):
            continue
        lvl, hi, lo = m._lvl[n], m._hi[n], m._lo[n]
        if hi == lo:
            problems.append(f"node {n} has equal children")
        for c in (hi, lo):
            if m._lvl[c] <= lvl:
                problems.append(f"node {n} child {c} out of order")
        key = (lvl, hi, lo)
        if key in seen:
            problems.append(f"nodes {seen[key]} and {n} are duplicates")
        seen[key] = n
    vals = [m.value(n) for n in m.nodes_of(d.node) if m.is_terminal(n)]
    if len(vals) != len(set(vals)):
        problems.append("duplicate terminals")
    return problems
