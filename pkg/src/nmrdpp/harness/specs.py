"""A pool of reward specifications, each given in both dialects.

Specs are written over the first proposition ``p1`` (the trigger) and the
last one ``pn`` (the goal), so they apply to any domain generated with
propositions ``p1 .. pn``. The PLTL and FLTL forms of a spec reward exactly
the same prefixes.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..logic.rewards import RewardSpec


@dataclass(frozen=True)
class PairedSpec:
    id: str
    pltl: tuple[tuple[str, float], ...]
    fltl: tuple[tuple[str, float], ...]

    def build(self, dialect: str, n: int) -> RewardSpec:
        pairs = self.pltl if dialect == "pltl" else self.fltl
        return RewardSpec.from_pairs([(_fill(f, n), v) for f, v in pairs], dialect)


def _fill(text: str, n: int) -> str:
    every = " & ".join(f"p{i}" for i in range(1, n + 1))
    return text.replace("ALL", f"({every})").replace("pn", f"p{n}")


POOL = (
    PairedSpec("const", (("true", 1.0),), (("alw $", 1.0),)),
    PairedSpec("markov", (("p1", 1.0),), (("alw (~p1 | $)", 1.0),)),
    PairedSpec("prev", (("prv p1", 1.0),), (("alw (~p1 | next $)", 1.0),)),
    PairedSpec("stage2-on", (("prv^2 true", 1.0),), (("next next alw $", 1.0),)),
    PairedSpec("first-all", (("ALL & ~prv pdi ALL", 1.0),), (("~ALL wun (ALL & $)", 1.0),)),
    PairedSpec("ever", (("pdi pn", 1.0),), (("~pn wun (pn & alw $)", 1.0),)),
    PairedSpec("since", (("pn snc p1", 1.0),),
               (("alw (~p1 | ($ & next ((pn & $) wun ~pn)))", 1.0),)),
    PairedSpec("guard2", (("pn & prv^2 p1", 1.0),), (("alw (~p1 | next next (~pn | $))", 1.0),)),
    PairedSpec("within2", (("pn & (p1 | prv p1 | prv^2 p1)", 1.0),),
               (("alw (~p1 | ((~pn | $) & next ((~pn | $) & next (~pn | $))))", 1.0),)),
    PairedSpec("never", (("~pdi pn", 1.0),), (("(~pn & $) wun pn", 1.0),)),
    PairedSpec("stage-exact", (("prv^2 true & ~prv^3 true", 1.0),), (("next next $", 1.0),)),
    PairedSpec("multi", (("prv p1", 2.0), ("pn", -1.0)),
               (("alw (~p1 | next $)", 2.0), ("alw (~pn | $)", -1.0))),
)

SINGLE_REWARD_IDS = ("markov", "prev", "stage2-on", "first-all", "ever", "since", "guard2", "within2")


def get_spec(spec_id: str) -> PairedSpec:
    for s in POOL:
        if s.id == spec_id:
            return s
    raise KeyError(f"unknown spec {spec_id!r}")


# -- parametrised experiment rewards ------------------------------------------

def _all(n: int) -> str:
    return "(" + " & ".join(f"p{i}" for i in range(1, n + 1)) + ")"


def _nexts(k: int, body: str) -> str:
    return f"next^{k} ({body})" if k else body


TABLE1_KINDS = ("first-all", "sequence", "consecutive", "prv-all")


def table1_spec(kind: str, dialect: str, n: int) -> RewardSpec:
    """The reward types whose expanded size classes the experiments compare."""
    every = _all(n)
    if kind == "first-all":
        text = (f"{every} & ~prv pdi {every}" if dialect == "pltl"
                else f"~{every} wun ({every} & $)")
    elif kind == "sequence":
        # p_n at stage 0, p_(n-1) at stage 1, ..., p_1 at stage n-1; reward at stage n
        if dialect == "pltl":
            text = " & ".join(f"prv^{i} p{i}" for i in range(1, n + 1)) + f" & prv^{n} ~prv true"
        else:
            text = "next $"
            for i in range(1, n + 1):
                text = f"p{i} & next ({text})" if i > 1 else f"p1 & {text}"
    elif kind == "consecutive":
        if n < 2:
            raise ValueError("two consecutive propositions need n >= 2")
        if dialect == "pltl":
            text = " | ".join(f"(prv p{i} & p{i + 1})" for i in range(1, n))
        else:
            text = "alw (" + " & ".join(f"(~p{i} | next (~p{i + 1} | $))" for i in range(1, n)) + ")"
    elif kind == "prv-all":
        text = f"prv^{n} {every}" if dialect == "pltl" else f"alw (~{every} | {_nexts(n, '$')})"
    else:
        raise KeyError(f"unknown reward type {kind!r}")
    return RewardSpec.from_pairs([(text, 1.0)], dialect)


def syntax_spec(form: str, dialect: str, n: int) -> RewardSpec:
    """``prv^n`` of the conjunction, written outside (``out``) or inside (``in``)."""
    if form == "out":
        return table1_spec("prv-all", dialect, n)
    if form != "in":
        raise KeyError(f"unknown syntax form {form!r}")
    if dialect == "pltl":
        text = " & ".join(f"prv^{n} p{i}" for i in range(1, n + 1))
    else:
        text = "alw (" + " | ".join(f"~p{i}" for i in range(1, n + 1)) + f" | {_nexts(n, '$')})"
    return RewardSpec.from_pairs([(text, 1.0)], dialect)


def multi_spec(dialect: str, n: int, value: float = 1.0) -> RewardSpec:
    """``n`` rewards of equal value, one for ``prv p_i`` per proposition."""
    if dialect == "pltl":
        pairs = [(f"prv p{i}", value) for i in range(1, n + 1)]
    else:
        pairs = [(f"alw (~p{i} | next $)", value) for i in range(1, n + 1)]
    return RewardSpec.from_pairs(pairs, dialect)


def _guard(dialect, k, trigger, goal):
    if dialect == "pltl":
        return f"{goal} & prv^{k} {trigger}"
    return f"alw (~{trigger} | {_nexts(k, f'~{goal} | $')})"


def guard_spec(dialect: str, k: int, trigger: str, goal: str, value: float = 1.0) -> RewardSpec:
    """Reward ``goal`` exactly ``k`` steps after ``trigger``."""
    return RewardSpec.from_pairs([(_guard(dialect, k, trigger, goal), value)], dialect)


def dynamics_spec(dialect: str, k: int, trigger: str, goal: str, guard_value: float,
                  r: float, against: str) -> RewardSpec:
    """Guard reward plus a competing reward ``r`` on ``~goal`` or ``~trigger``.

    ``against`` names what the competing reward discourages: ``"goal"`` or
    ``"trigger"``.
    """
    if against not in ("goal", "trigger"):
        raise ValueError("against must be 'goal' or 'trigger'")
    prop = goal if against == "goal" else trigger
    other = f"~{prop}" if dialect == "pltl" else f"alw ({prop} | $)"
    return RewardSpec.from_pairs([(_guard(dialect, k, trigger, goal), guard_value), (other, r)],
                                 dialect)
