"""Past temporal logic: subformula closure, regression and trace semantics."""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from ..errors import EntailmentError, UnboundAtomError
from . import formula as F
from .formula import AND, ATOM, FALSE_OP, NOT, OR, PREV, SINCE, TRUE_OP, Formula
from .simplify import simplify

Valuation = Mapping[str, bool]


class Closure:
    """Ordered, subformula-closed set of formulas.

    Members are kept in post-order of first appearance, so every member comes
    after all of its children.
    """

    def __init__(self, members: Iterable[Formula]):
        self.members: tuple[Formula, ...] = tuple(members)
        self.index = {f: i for i, f in enumerate(self.members)}

    def __contains__(self, f):
        return f in self.index

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return "Closure(" + ", ".join(map(str, self.members)) + ")"


def subformula_closure(formulas: Iterable[Formula]) -> Closure:
    seen: dict[Formula, None] = {}
    for phi in formulas:
        for g in phi.walk():
            if g not in seen:
                seen[g] = None
    return Closure(seen)


def pure_temporal_subformulas(formulas: Iterable[Formula]) -> list[Formula]:
    return [g for g in subformula_closure(formulas) if g.op in (PREV, SINCE)]


def _lookup(s: Valuation, name: str) -> bool:
    try:
        return bool(s[name])
    except KeyError:
        raise UnboundAtomError(f"atom {name!r} is not bound in the state") from None


def regress(phi: Formula, s: Valuation) -> Formula:
    """What must have held on the prefix for ``phi`` to hold after ``s``.

    ``phi`` holds on a sequence ending in ``s`` iff the result holds on the
    sequence with ``s`` removed.
    """
    return simplify(_regress(phi, s, {}))


def _regress(phi, s, memo):
    hit = memo.get(phi)
    if hit is not None:
        return hit
    op = phi.op
    if op == ATOM:
        out = F.const(_lookup(s, phi.name))
    elif op in (TRUE_OP, FALSE_OP):
        out = phi
    elif op == NOT:
        out = F.neg(_regress(phi.args[0], s, memo))
    elif op == AND:
        out = F.conj(_regress(phi.args[0], s, memo), _regress(phi.args[1], s, memo))
    elif op == OR:
        out = F.disj(_regress(phi.args[0], s, memo), _regress(phi.args[1], s, memo))
    elif op == PREV:
        out = phi.args[0]
    elif op == SINCE:
        a, b = phi.args
        out = F.disj(_regress(b, s, memo), F.conj(_regress(a, s, memo), phi))
    else:
        raise ValueError(f"not a PLTL formula: {phi}")
    memo[phi] = out
    return out


def evaluate_pltl(phi: Formula, trace: Sequence[Valuation]) -> bool:
    """Truth of ``phi`` on the finite sequence ``trace`` (at its last state)."""
    if not trace:
        raise ValueError("cannot evaluate a formula on an empty sequence")
    ev = TraceEvaluator()
    for s in trace:
        ev.push(s)
    return ev.holds(phi)


class TraceEvaluator:
    """Direct past-time semantics over a growable sequence.

    Truth values at index ``i`` depend only on the prefix up to ``i``, so they
    are memoised per index and stay valid while the sequence is extended or
    popped back to a longer prefix. This makes depth-first enumeration of
    traces cheap. ``S`` is evaluated by its definition (a witness index and a
    scan), not by the one-step recurrence used by regression.
    """

    def __init__(self):
        self.states: list[Valuation] = []
        self._memo: list[dict] = []

    def __len__(self):
        return len(self.states)

    def push(self, s: Valuation):
        self.states.append(s)
        self._memo.append({})

    def pop(self):
        self.states.pop()
        self._memo.pop()

    def holds(self, phi: Formula, i: int | None = None) -> bool:
        if i is None:
            i = len(self.states) - 1
        if i < 0:
            raise ValueError("cannot evaluate a formula on an empty sequence")
        return self._at(phi, i)

    def _at(self, phi, i):
        memo = self._memo[i]
        v = memo.get(phi)
        if v is not None:
            return v
        op = phi.op
        if op == ATOM:
            v = _lookup(self.states[i], phi.name)
        elif op == TRUE_OP:
            v = True
        elif op == FALSE_OP:
            v = False
        elif op == NOT:
            v = not self._at(phi.args[0], i)
        elif op == AND:
            v = self._at(phi.args[0], i) and self._at(phi.args[1], i)
        elif op == OR:
            v = self._at(phi.args[0], i) or self._at(phi.args[1], i)
        elif op == PREV:
            v = i >= 1 and self._at(phi.args[0], i - 1)
        elif op == SINCE:
            a, b = phi.args
            v = False
            for j in range(i, -1, -1):
                if self._at(b, j):
                    v = True
                    break
                if not self._at(a, j):
                    break
        else:
            raise ValueError(f"not a PLTL formula: {phi}")
        memo[phi] = v
        return v


class LiteralSet:
    """Total truth assignment over a finite domain of formulas.

    Stored as the domain plus the subset of members that are true; every
    other member of the domain is false.
    """

    __slots__ = ("domain", "true")

    def __init__(self, domain, true):
        self.domain = domain
        self.true = frozenset(true)

    def truth(self, f: Formula):
        if f in self.true:
            return True
        if f in self.domain:
            return False
        return None

    def __eq__(self, other):
        return isinstance(other, LiteralSet) and self.true == other.true

    def __hash__(self):
        return hash(self.true)

    def __repr__(self):
        return "{" + ", ".join(sorted(map(str, self.true))) + "}"


def entails(psi: LiteralSet, phi: Formula) -> bool:
    """Evaluate ``phi`` reading members of ``psi``'s domain from ``psi``.

    Any subterm found in the domain is looked up directly; boolean connectives
    above those are computed. A temporal subterm or atom that is not covered
    raises :class:`EntailmentError`.
    """
    v = psi.truth(phi)
    if v is not None:
        return v
    op = phi.op
    if op == TRUE_OP:
        return True
    if op == FALSE_OP:
        return False
    if op == NOT:
        return not entails(psi, phi.args[0])
    if op == AND:
        return entails(psi, phi.args[0]) and entails(psi, phi.args[1])
    if op == OR:
        return entails(psi, phi.args[0]) or entails(psi, phi.args[1])
    raise EntailmentError(f"{phi} is not covered by the label")
