"""$FLTL progression and the reward it distributes along a sequence."""
from __future__ import annotations

from typing import Sequence

from . import formula as F
from .formula import (
    AND, ATOM, DOLLAR, FALSE, FALSE_OP, NEXT, NOT, OR, TRUE_OP, WUNTIL, Formula,
)
from .pltl import Valuation, _lookup
from .simplify import simplify


def _prog(phi: Formula, s: Valuation, dollar: bool, memo: dict) -> Formula:
    hit = memo.get(phi)
    if hit is not None:
        return hit
    op = phi.op
    if op == ATOM:
        out = F.const(_lookup(s, phi.name))
    elif op == NOT:
        # NNF: negation sits on atoms only
        out = F.const(not _lookup(s, phi.args[0].name))
    elif op in (TRUE_OP, FALSE_OP):
        out = phi
    elif op == DOLLAR:
        out = F.const(dollar)
    elif op == AND:
        out = F.conj(_prog(phi.args[0], s, dollar, memo), _prog(phi.args[1], s, dollar, memo))
    elif op == OR:
        out = F.disj(_prog(phi.args[0], s, dollar, memo), _prog(phi.args[1], s, dollar, memo))
    elif op == NEXT:
        out = phi.args[0]
    elif op == WUNTIL:
        a, b = phi.args
        out = F.disj(_prog(b, s, dollar, memo), F.conj(_prog(a, s, dollar, memo), phi))
    else:
        raise ValueError(f"not an FLTL formula: {phi}")
    memo[phi] = out
    return out


def progress(phi: Formula, s: Valuation) -> tuple[Formula, bool]:
    """Progress ``phi`` through state ``s``; return (next formula, rewarded).

    ``$`` is made true only when needed: the formula is first progressed with
    ``$`` false, and only if that collapses to ``false`` while reading ``$`` as
    true does not, the stage is rewarded and the second result is kept.
    """
    first = simplify(_prog(phi, s, False, {}))
    if first is not FALSE or not F.has_dollar(phi):
        return first, False
    second = simplify(_prog(phi, s, True, {}))
    if second is FALSE:
        return FALSE, False
    return second, True


def reward_trace(spec, trace: Sequence[Valuation]) -> list[tuple[int, float]]:
    """Reward collected at each stage of ``trace`` under an FLTL spec.

    Returns one ``(stage, total)`` pair per state of the sequence.
    """
    current = [e.formula for e in spec.entries]
    out = []
    for i, s in enumerate(trace):
        total = 0.0
        for k, e in enumerate(spec.entries):
            current[k], hit = progress(current[k], s)
            if hit:
                total += e.value
        out.append((i, total))
    return out


def refuted(phi: Formula, trace: Sequence[Valuation], i: int = 0) -> bool:
    """Whether the finite prefix ``trace`` already refutes ``phi`` at index ``i``.

    Brute-force reading of the future semantics on a prefix: a literal is
    refuted only by a state inside the prefix, ``a wun b`` is refuted when
    some position ``k`` refutes ``a`` and every position up to ``k`` refutes
    ``b``. All positions past the end of the prefix behave alike, so ``k``
    ranges up to the prefix length. Only meaningful for ``$``-free formulas.
    """
    n = len(trace)
    memo: dict = {}

    def r(f, j):
        j = min(j, n)
        key = (f, j)
        if key in memo:
            return memo[key]
        op = f.op
        if op == TRUE_OP:
            v = False
        elif op == FALSE_OP:
            v = True
        elif op == ATOM:
            v = j < n and not _lookup(trace[j], f.name)
        elif op == NOT:
            v = j < n and _lookup(trace[j], f.args[0].name)
        elif op == AND:
            v = r(f.args[0], j) or r(f.args[1], j)
        elif op == OR:
            v = r(f.args[0], j) and r(f.args[1], j)
        elif op == NEXT:
            v = r(f.args[0], j + 1)
        elif op == WUNTIL:
            a, b = f.args
            v = False
            for k in range(j, n + 1):
                if not r(b, k):
                    break
                if r(a, k):
                    v = True
                    break
        else:
            raise ValueError(f"refutation is defined for $-free formulas only: {f}")
        memo[key] = v
        return v

    return r(phi, i)
