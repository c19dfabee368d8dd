"""Reader for the SPUDD-style domain format.

::

    variables (p1 p2)
    action a1
      p1 (p2 (0.9) (0.1))   % then-branch: p2 currently true
      p2 (1.0)
    endaction
    discount 0.9
    init (p1 ~p2)

Propositions not mentioned in an action keep their value.
"""
from __future__ import annotations

import re

from ..errors import DomainParseError
from .model import FactoredNMRDP

_TOKEN = re.compile(r"\s+|%[^\n]*|\(|\)|[^\s()%]+")


def _tokens(text):
    line, col_start = 1, 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        col = m.start() - col_start + 1
        if tok[0].isspace() or tok[0] == "%":
            nl = tok.count("\n")
            if nl:
                line += nl
                col_start = m.start() + tok.rfind("\n") + 1
            continue
        yield tok, line, col


class _Reader:
    def __init__(self, text):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def where(self):
        if self.i < len(self.toks):
            return self.toks[self.i][1:]
        if self.toks:
            return self.toks[-1][1:]
        return 1, 1

    def error(self, msg, at=None):
        line, col = at if at else self.where()
        raise DomainParseError(msg, line, col)

    def next(self, what="token"):
        if self.i >= len(self.toks):
            self.error(f"unexpected end of input, expected {what}")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok, line, col = self.next(repr(text))
        if tok != text:
            self.error(f"expected {text!r}, found {tok!r}", (line, col))
        return tok

    def name_list(self):
        self.expect("(")
        out = []
        while self.peek() != ")":
            if self.peek() in (None, "("):
                self.error("expected ')'")
            out.append(self.next()[0])
        self.expect(")")
        return out

    def tree(self, props):
        self.expect("(")
        tok, line, col = self.next("probability or proposition")
        if tok in ("(", ")"):
            self.error("expected probability or proposition", (line, col))
        try:
            p = float(tok)
        except ValueError:
            if tok not in props:
                self.error(f"unknown proposition {tok!r}", (line, col))
            then = self.tree(props)
            other = self.tree(props)
            self.expect(")")
            return (tok, then, other)
        if not 0.0 <= p <= 1.0:
            self.error(f"probability {tok} outside [0, 1]", (line, col))
        self.expect(")")
        return p


def parse_domain(text: str, name: str = "") -> FactoredNMRDP:
    r = _Reader(text)
    props: list[str] = []
    actions: dict = {}
    discount = None
    init = 0
    while r.peek() is not None:
        tok, line, col = r.next()
        if tok == "variables":
            if props:
                r.error("variables declared twice", (line, col))
            props = r.name_list()
            if len(set(props)) != len(props):
                r.error("duplicate proposition in variables", (line, col))
        elif tok == "action":
            if not props:
                r.error("action before variables declaration", (line, col))
            aname, aline, acol = r.next("action name")
            if aname in actions:
                r.error(f"duplicate action {aname!r}", (aline, acol))
            effects = {}
            while True:
                head = r.peek()
                if head is None:
                    r.error(f"action {aname!r} is missing 'endaction'")
                if head == "endaction":
                    r.next()
                    break
                p, pline, pcol = r.next()
                if p not in props:
                    r.error(f"unknown proposition {p!r}", (pline, pcol))
                if p in effects:
                    r.error(f"proposition {p!r} given twice in action {aname!r}", (pline, pcol))
                effects[p] = r.tree(props)
            if not effects:
                r.error(f"action {aname!r} has an empty body", (aline, acol))
            actions[aname] = effects
        elif tok == "discount":
            v, vline, vcol = r.next("discount value")
            try:
                discount = float(v)
            except ValueError:
                r.error(f"bad discount {v!r}", (vline, vcol))
            if not 0.0 < discount < 1.0:
                r.error("discount must lie strictly between 0 and 1", (vline, vcol))
        elif tok == "init":
            ipos = r.where()
            for lit in r.name_list():
                neg = lit.startswith("~")
                p = lit[1:] if neg else lit
                if p not in props:
                    r.error(f"unknown proposition {p!r} in init", ipos)
                if not neg:
                    init |= 1 << props.index(p)
        else:
            r.error(f"unexpected {tok!r}", (line, col))
    if not props:
        r.error("missing variables declaration")
    if not actions:
        r.error("domain declares no actions")
    return FactoredNMRDP(tuple(props), actions, init,
                         0.9 if discount is None else discount, None, name)
