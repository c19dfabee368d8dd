"""Reward specifications: named temporal formulas with real values."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..errors import ParseError
from .formula import Formula
from .parser import DIALECTS, PLTL, format_formula, parse_formula


@dataclass(frozen=True)
class RewardEntry:
    name: str
    formula: Formula
    value: float


@dataclass(frozen=True)
class RewardSpec:
    """Reward entries plus optional control formulas, all in one dialect."""

    entries: tuple[RewardEntry, ...]
    dialect: str = PLTL
    control: tuple[Formula, ...] = field(default=())

    def __post_init__(self):
        if self.dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {self.dialect!r}")
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("reward names must be unique")
        for e in self.entries:
            if not math.isfinite(e.value):
                raise ValueError(f"reward {e.name!r} has a non-finite value")

    @property
    def formulas(self) -> list[Formula]:
        return [e.formula for e in self.entries]

    @classmethod
    def from_pairs(cls, pairs, dialect=PLTL, control=()):
        """Build from ``(formula text or Formula, value)`` pairs; names are r1, r2 ..."""
        entries = []
        for i, (f, v) in enumerate(pairs, 1):
            if isinstance(f, str):
                f = parse_formula(f, dialect)
            entries.append(RewardEntry(f"r{i}", f, float(v)))
        ctl = tuple(parse_formula(c, dialect) if isinstance(c, str) else c for c in control)
        return cls(tuple(entries), dialect, ctl)

    def with_control(self, control) -> RewardSpec:
        ctl = tuple(parse_formula(c, self.dialect) if isinstance(c, str) else c for c in control)
        return RewardSpec(self.entries, self.dialect, ctl)

    def dump(self) -> str:
        lines = [f"dialect {self.dialect}"]
        for e in self.entries:
            lines.append(f"reward {e.name} {e.value!r} : {format_formula(e.formula)}")
        for c in self.control:
            lines.append(f"control : {format_formula(c)}")
        return "\n".join(lines) + "\n"


_REWARD = re.compile(r"reward\s+([A-Za-z_][\w\-]*)\s+(\S+)\s*:(.*)$")
_CONTROL = re.compile(r"control\s*:(.*)$")


def parse_reward_file(text: str) -> RewardSpec:
    """Parse the line-based reward/control format.

    ``%`` starts a comment. A ``dialect pltl|fltl`` header must precede any
    formula line.
    """
    dialect = None
    entries: list[RewardEntry] = []
    control: list[Formula] = []
    names: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0]
        body = line.strip()
        if not body:
            continue
        indent = len(line) - len(line.lstrip())
        if body.startswith("dialect"):
            parts = body.split()
            if len(parts) != 2 or parts[1].lower() not in DIALECTS:
                raise ParseError("expected 'dialect pltl' or 'dialect fltl'", ln, indent + 1)
            if dialect is not None:
                raise ParseError("dialect declared twice", ln, indent + 1)
            dialect = parts[1].lower()
            continue
        m = _REWARD.match(body)
        c = _CONTROL.match(body)
        if not m and not c:
            raise ParseError(f"unrecognised line {body!r}", ln, indent + 1)
        if dialect is None:
            raise ParseError("missing 'dialect' header before first formula", ln, indent + 1)
        if m:
            name, value = m.group(1), m.group(2)
            if name in names:
                raise ParseError(f"duplicate reward name {name!r}", ln, indent + 1)
            try:
                v = float(value)
            except ValueError:
                raise ParseError(f"bad reward value {value!r}", ln, indent + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"reward value must be finite, got {value!r}", ln, indent + 1)
            ftext, fcol = m.group(3), indent + 1 + m.start(3)
        else:
            ftext, fcol = c.group(1), indent + 1 + c.start(1)
        f = parse_formula(ftext, dialect, ln, fcol)
        if m:
            names.add(name)
            entries.append(RewardEntry(name, f, v))
        else:
            control.append(f)
    if dialect is None:
        raise ParseError("missing 'dialect' header")
    return RewardSpec(tuple(entries), dialect, tuple(control))
