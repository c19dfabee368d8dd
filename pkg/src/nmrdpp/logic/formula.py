"""Hash-consed formula trees shared by the past (PLTL) and future ($FLTL) dialects.

Every formula is interned: two structurally equal formulas are the same
Python object, so ``==`` and ``hash`` are identity based and cheap even for
deep trees. Build formulas only through the constructor functions below.
"""
from __future__ import annotations

import threading
from typing import Iterator

TRUE_OP = "true"
FALSE_OP = "false"
ATOM = "atom"
NOT = "not"
AND = "and"
OR = "or"
# past operators
PREV = "prv"
SINCE = "snc"
# future operators
NEXT = "next"
WUNTIL = "wun"
DOLLAR = "$"

TEMPORAL_PAST = frozenset({PREV, SINCE})
TEMPORAL_FUTURE = frozenset({NEXT, WUNTIL})
BINARY = frozenset({AND, OR, SINCE, WUNTIL})

_INTERN: dict = {}
_LOCK = threading.Lock()


class Formula:
    """Immutable, interned formula node.

    ``op`` is one of the module-level operator constants, ``args`` the child
    formulas and ``name`` the proposition name for atoms.
    """

    __slots__ = ("op", "args", "name", "_str", "_size", "__weakref__")

    def __init__(self, op, args, name):
        self.op = op
        self.args = args
        self.name = name
        self._str = None
        self._size = None

    def __setattr__(self, key, value):
        if key in ("_str", "_size") or not hasattr(self, "_size"):
            object.__setattr__(self, key, value)
        else:
            raise AttributeError("formulas are immutable")

    def __reduce__(self):
        return (_mk, (self.op, self.args, self.name))

    def __repr__(self):
        return f"Formula({self})"

    def __str__(self):
        if self._str is None:
            self._str = to_text(self)
        return self._str

    def __lt__(self, other):
        return str(self) < str(other)

    @property
    def size(self) -> int:
        if self._size is None:
            self._size = 1 + sum(a.size for a in self.args)
        return self._size

    @property
    def is_const(self) -> bool:
        return self.op == TRUE_OP or self.op == FALSE_OP

    @property
    def is_literal(self) -> bool:
        return self.op == ATOM or (self.op == NOT and self.args[0].op == ATOM)

    def walk(self) -> Iterator[Formula]:
        """Post-order traversal (children before parents, duplicates kept)."""
        for a in self.args:
            yield from a.walk()
        yield self


def _mk(op, args=(), name=None) -> Formula:
    key = (op, args, name)
    f = _INTERN.get(key)
    if f is None:
        with _LOCK:
            f = _INTERN.get(key)
            if f is None:
                f = Formula(op, args, name)
                _INTERN[key] = f
    return f


TRUE = _mk(TRUE_OP)
FALSE = _mk(FALSE_OP)
DOLLAR_F = _mk(DOLLAR)


def const(value: bool) -> Formula:
    return TRUE if value else FALSE


def atom(name: str) -> Formula:
    return _mk(ATOM, (), name)


def neg(f: Formula) -> Formula:
    return _mk(NOT, (f,))


def conj(a: Formula, b: Formula) -> Formula:
    return _mk(AND, (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return _mk(OR, (a, b))


def prev(f: Formula, k: int = 1) -> Formula:
    for _ in range(k):
        f = _mk(PREV, (f,))
    return f


def since(a: Formula, b: Formula) -> Formula:
    return _mk(SINCE, (a, b))


def once(f: Formula) -> Formula:
    """Sometime in the past: ``true S f``."""
    return since(TRUE, f)


def historically(f: Formula) -> Formula:
    """Always in the past: ``~(true S ~f)``."""
    return neg(since(TRUE, neg(f)))


def nxt(f: Formula, k: int = 1) -> Formula:
    for _ in range(k):
        f = _mk(NEXT, (f,))
    return f


def wuntil(a: Formula, b: Formula) -> Formula:
    return _mk(WUNTIL, (a, b))


def always(f: Formula) -> Formula:
    return wuntil(f, FALSE)


def conj_all(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return TRUE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = conj(f, out)
    return out


def disj_all(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return FALSE
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = disj(f, out)
    return out


def atoms(f: Formula) -> set[str]:
    return {g.name for g in f.walk() if g.op == ATOM}


def has_dollar(f: Formula) -> bool:
    return any(g.op == DOLLAR for g in f.walk())


def depth(f: Formula) -> int:
    if not f.args:
        return 0
    return 1 + max(depth(a) for a in f.args)


_PREFIX = {NOT: "~", PREV: "prv ", NEXT: "next "}
_INFIX = {AND: "&", OR: "|", SINCE: "snc", WUNTIL: "wun"}


def to_text(f: Formula) -> str:
    """Fully parenthesised concrete syntax; parses back to the same formula."""
    op = f.op
    if op == ATOM:
        return f.name
    if op in (TRUE_OP, FALSE_OP, DOLLAR):
        return op
    if op in _PREFIX:
        return _PREFIX[op] + to_text(f.args[0])
    return f"({to_text(f.args[0])} {_INFIX[op]} {to_text(f.args[1])})"

