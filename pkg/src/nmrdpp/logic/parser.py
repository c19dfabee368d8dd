"""Concrete syntax for reward and control formulas.

Grammar (PLTL)::

    f ::= true | false | IDENT | ~f | (f) | f & f | f | f | f -> f | f <-> f
        | prv f | prv^K f | f snc f | pdi f | pbx f

$FLTL replaces the past operators with ``$``, ``next f`` (also ``next^K f``),
``f wun f`` and ``alw f``. Precedence from tightest: unary operators,
``snc``/``wun`` (right associative), ``&``, ``|``, ``->`` (right
associative), ``<->``.

Derived operators are expanded while parsing: ``pdi f`` becomes
``true snc f``, ``pbx f`` becomes ``~(true snc ~f)``, ``alw f`` becomes
``f wun false``. $FLTL input is converted to negation normal form; negating a
temporal subformula or ``$`` is rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import FormulaSyntaxError
from . import formula as F

PLTL = "pltl"
FLTL = "fltl"
DIALECTS = (PLTL, FLTL)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<pow>(?:prv|next)\^\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[~&|()$])
  """,
    re.VERBOSE,
)

_PAST_KW = {"prv", "snc", "pdi", "pbx"}
_FUTURE_KW = {"next", "wun", "alw"}
_KEYWORDS = _PAST_KW | _FUTURE_KW | {"true", "false"}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    base_line, base_col = line, col
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        ln, cl = _where(text, pos, base_line, base_col)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", ln, cl)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, value, ln, cl))
        pos = m.end()
    eln, ecl = _where(text, len(text), base_line, base_col)
    toks.append(_Tok("eof", "", eln, ecl))
    return toks


def _where(text, pos, line, col):
    before = text[:pos]
    nl = before.count("\n")
    if nl:
        return line + nl, pos - before.rfind("\n")
    return line, col + pos


# Raw syntax trees are nested tuples: ("atom", name), ("not", a), ("imp", a, b) ...
class _Parser:
    def __init__(self, toks, dialect):
        self.toks = toks
        self.i = 0
        self.dialect = dialect

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise FormulaSyntaxError(msg, tok.line, tok.col)

    def expect_operand(self, op_tok):
        if self.tok.kind == "eof" or self.tok.text in (")", "&", "|", "->", "<->", "snc", "wun"):
            self.error(f"missing right operand for {op_tok.text!r}")

    def parse(self):
        if self.tok.kind == "eof":
            self.error("empty formula")
        tree = self.iff()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return tree

    def iff(self):
        left = self.imp()
        while self.tok.text == "<->":
            op = self.advance()
            self.expect_operand(op)
            left = ("iff", left, self.imp(), op)
        return left

    def imp(self):
        left = self.disj()
        if self.tok.text == "->":
            op = self.advance()
            self.expect_operand(op)
            return ("imp", left, self.imp(), op)
        return left

    def disj(self):
        left = self.conj()
        while self.tok.text == "|":
            op = self.advance()
            self.expect_operand(op)
            left = ("or", left, self.conj())
        return left

    def conj(self):
        left = self.temporal()
        while self.tok.text == "&":
            op = self.advance()
            self.expect_operand(op)
            left = ("and", left, self.temporal())
        return left

    def temporal(self):
        left = self.unary()
        if self.tok.text in ("snc", "wun"):
            op = self.advance()
            self._check_dialect(op)
            self.expect_operand(op)
            return (op.text, left, self.temporal())
        return left

    def unary(self):
        t = self.tok
        if t.text == "~":
            self.advance()
            self.expect_operand(t)
            return ("not", self.unary(), t)
        if t.kind == "pow":
            self.advance()
            name, k = t.text.split("^")
            self._check_dialect(t, name)
            self.expect_operand(t)
            child = self.unary()
            for _ in range(int(k)):
                child = (name, child)
            return child
        if t.kind == "kw" and t.text in ("prv", "pdi", "pbx", "next", "alw"):
            self.advance()
            self._check_dialect(t)
            self.expect_operand(t)
            return (t.text, self.unary())
        return self.primary()

    def primary(self):
        t = self.advance()
        if t.text == "(":
            self.expect_operand(t)
            inner = self.iff()
            if self.tok.text != ")":
                self.error("expected ')'")
            self.advance()
            return inner
        if t.text in ("true", "false"):
            return (t.text,)
        if t.text == "$":
            if self.dialect != FLTL:
                self.error("'$' is only available in fltl", t)
            return ("$",)
        if t.kind == "ident":
            return ("atom", t.text)
        if t.kind == "eof":
            self.error("unexpected end of formula", t)
        if t.kind == "kw":
            self.error(f"missing left operand for {t.text!r}", t)
        self.error(f"unexpected {t.text!r}", t)

    def _check_dialect(self, tok, name=None):
        name = name or tok.text
        if self.dialect == PLTL and name in _FUTURE_KW:
            self.error(f"{name!r} is an fltl operator", tok)
        if self.dialect == FLTL and name in _PAST_KW:
            self.error(f"{name!r} is a pltl operator", tok)


def _build_pltl(t):
    kind = t[0]
    if kind == "atom":
        return F.atom(t[1])
    if kind == "true":
        return F.TRUE
    if kind == "false":
        return F.FALSE
    if kind == "not":
        return F.neg(_build_pltl(t[1]))
    if kind == "and":
        return F.conj(_build_pltl(t[1]), _build_pltl(t[2]))
    if kind == "or":
        return F.disj(_build_pltl(t[1]), _build_pltl(t[2]))
    if kind == "imp":
        return F.disj(F.neg(_build_pltl(t[1])), _build_pltl(t[2]))
    if kind == "iff":
        a, b = _build_pltl(t[1]), _build_pltl(t[2])
        return F.conj(F.disj(F.neg(a), b), F.disj(F.neg(b), a))
    if kind == "prv":
        return F.prev(_build_pltl(t[1]))
    if kind == "snc":
        return F.since(_build_pltl(t[1]), _build_pltl(t[2]))
    if kind == "pdi":
        return F.once(_build_pltl(t[1]))
    if kind == "pbx":
        return F.historically(_build_pltl(t[1]))
    raise AssertionError(kind)


def _propositional(t) -> bool:
    if t[0] in ("atom", "true", "false"):
        return True
    if t[0] in ("not", "and", "or"):
        return all(_propositional(c) for c in t[1:] if isinstance(c, tuple))
    return False


def _build_fltl(t, neg_tok=None):
    """Build ``t`` in negation normal form; ``neg_tok`` is set when negated."""
    kind = t[0]
    negated = neg_tok is not None
    if kind == "atom":
        a = F.atom(t[1])
        return F.neg(a) if negated else a
    if kind == "true":
        return F.FALSE if negated else F.TRUE
    if kind == "false":
        return F.TRUE if negated else F.FALSE
    if kind == "not":
        return _build_fltl(t[1], None if negated else t[2])
    if kind in ("and", "or"):
        a, b = _build_fltl(t[1], neg_tok), _build_fltl(t[2], neg_tok)
        if (kind == "and") != negated:
            return F.conj(a, b)
        return F.disj(a, b)
    if kind == "imp":
        tok = t[3]
        if not _propositional(t[1]):
            raise FormulaSyntaxError(
                "'->' needs a propositional antecedent in fltl", tok.line, tok.col)
        return _build_fltl(("or", ("not", t[1], tok), t[2]), neg_tok)
    if kind == "iff":
        tok = t[3]
        if not (_propositional(t[1]) and _propositional(t[2])):
            raise FormulaSyntaxError(
                "'<->' needs propositional operands in fltl", tok.line, tok.col)
        a, b = t[1], t[2]
        return _build_fltl(
            ("and", ("or", ("not", a, tok), b), ("or", ("not", b, tok), a)), neg_tok)
    if negated:
        raise FormulaSyntaxError(
            f"negation of {kind!r} is not expressible in negation normal form",
            neg_tok.line, neg_tok.col)
    if kind == "$":
        return F.DOLLAR_F
    if kind == "next":
        return F.nxt(_build_fltl(t[1]))
    if kind == "wun":
        return F.wuntil(_build_fltl(t[1]), _build_fltl(t[2]))
    if kind == "alw":
        return F.always(_build_fltl(t[1]))
    raise AssertionError(kind)


def parse_formula(text: str, dialect: str = PLTL, line: int = 1, col: int = 1) -> F.Formula:
    """Parse ``text`` in the given dialect (``"pltl"`` or ``"fltl"``)."""
    dialect = dialect.lower()
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}")
    tree = _Parser(tokenize(text, line, col), dialect).parse()
    if dialect == PLTL:
        return _build_pltl(tree)
    return _build_fltl(tree)


def format_formula(f: F.Formula) -> str:
    return F.to_text(f)
