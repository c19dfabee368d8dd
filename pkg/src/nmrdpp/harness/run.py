"""The solve pipeline: preprocess, optionally expand, then solve, with statistics.

Every run reports the same fixed set of fields so rows from different
methods and solvers line up in one CSV table.
"""
from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, field, fields, replace

from ..domain.model import DEFAULT_EXPLICIT_CAP, FactoredNMRDP
from ..domain.parser import parse_domain
from ..errors import CapExceeded, ConfigError, ExplicitCapExceeded, InfeasibleError
from ..logic.rewards import RewardSpec, parse_reward_file
from ..solvers.explicit import SolverConfig, policy_iteration, value_iteration
from ..solvers.lao import XmdpGenerator, lao_star
from ..solvers.spudd import spudd_solve
from ..translate.fltl_expand import FltlGenerator
from ..translate.pltl_expand import PltlGenerator, pltlmin_preprocess
from ..translate.pltlstr import DEFAULT_NODE_BUDGET, pltlstr_reachability, pltlstr_translate
from ..translate.xmdp import DEFAULT_ESTATE_CAP, XMDP, expand, prune_dead

METHODS = ("pltlsim", "pltlmin", "pltlstr", "pltlstr-a", "fltl")
SOLVERS = ("vi", "pi", "lao-vi", "lao-pi", "spudd")
STRUCTURED = ("pltlstr", "pltlstr-a")
CSV_COLUMNS = ("method", "solver", "family", "n", "spec-id", "states", "estates", "nodes",
               "t_pre_ms", "t_exp_ms", "t_solve_ms", "iters", "v_s0", "status")


def dialect_of(method: str) -> str:
    return "fltl" if method == "fltl" else "pltl"


@dataclass(frozen=True)
class Caps:
    estates: int = DEFAULT_ESTATE_CAP
    nodes: int = DEFAULT_NODE_BUDGET
    explicit: int = DEFAULT_EXPLICIT_CAP  # propositions for which |S| is still counted

    @classmethod
    def from_env(cls, base: Caps | None = None, env: str = "NMRDPP_CAPS") -> Caps:
        """Overrides from ``NMRDPP_CAPS``, e.g. ``estates=50000,nodes=1e6``."""
        caps = base or cls()
        text = os.environ.get(env, "").strip()
        if not text:
            return caps
        known = {f.name for f in fields(cls)}
        changes = {}
        for part in text.split(","):
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ConfigError(f"bad {env} entry {part!r}; expected one of {sorted(known)}=N")
            try:
                changes[key] = int(float(value))
            except ValueError:
                raise ConfigError(f"bad {env} value {value!r}") from None
        return replace(caps, **changes)


@dataclass
class RunConfig:
    method: str
    solver: str
    domain: FactoredNMRDP | None = None
    rewards: RewardSpec | None = None
    domain_path: str | None = None
    rewards_path: str | None = None
    control_path: str | None = None
    solver_cfg: SolverConfig | None = None
    expand: bool = False  # lao-* over an explicit expansion instead of the generator
    caps: Caps = field(default_factory=Caps)
    seed: int = 0
    family: str = ""
    n: int | None = None
    spec_id: str = ""

    def validate(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}; expected one of {', '.join(SOLVERS)}")
        if self.solver == "spudd" and self.method not in STRUCTURED:
            raise ConfigError("spudd needs method pltlstr or pltlstr-a")
        if self.method in STRUCTURED and self.solver != "spudd":
            raise ConfigError(f"method {self.method} produces a factored MDP; only spudd can solve it")
        if self.domain is None and self.domain_path is None:
            raise ConfigError("no domain given")


@dataclass
class RunStats:
    method: str
    solver: str
    family: str = ""
    n: int | None = None
    spec_id: str = ""
    states: int | None = None
    estates: int | None = None
    nodes: int | None = None
    t_pre_ms: float = 0.0
    t_exp_ms: float = 0.0
    t_solve_ms: float = 0.0
    iters: int | None = None
    v_s0: float | None = None
    status: str = "ok"
    # artefacts, not part of the CSV row
    policy_lines: list[str] = field(default_factory=list, repr=False)
    policy_dot: str | None = field(default=None, repr=False)
    xmdp: XMDP | None = field(default=None, repr=False)

    def row(self) -> dict:
        out = {}
        for col in CSV_COLUMNS:
            v = getattr(self, col.replace("-", "_"))
            if v is None:
                v = ""
            elif isinstance(v, float) and col.startswith("t_"):
                v = f"{v:.3f}"
            elif isinstance(v, float):
                v = repr(v)
            out[col] = v
        return out

    def policy_text(self) -> str:
        return "\n".join(self.policy_lines) + ("\n" if self.policy_lines else "")


def write_csv(rows: list[RunStats], handle=None) -> str:
    """RFC-4180 text (CRLF line ends) of ``rows``; also written to ``handle`` if given."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    w.writeheader()
    for r in rows:
        w.writerow(r.row())
    text = buf.getvalue()
    if handle is not None:
        handle.write(text)
    return text


def load_inputs(cfg: RunConfig) -> tuple[FactoredNMRDP, RewardSpec]:
    """Domain and reward specification of a run, with control folded in."""
    d = cfg.domain
    if d is None:
        d = parse_domain(_read(cfg.domain_path), name=os.path.basename(cfg.domain_path))
    spec = cfg.rewards
    if spec is None and cfg.rewards_path is not None:
        spec = parse_reward_file(_read(cfg.rewards_path))
    if spec is None:
        spec = d.rewards
    if spec is None:
        raise ConfigError("no reward specification given")
    if cfg.control_path is not None:
        extra = parse_reward_file(_read(cfg.control_path))
        if extra.dialect != spec.dialect:
            raise ConfigError(f"control is written in {extra.dialect}, rewards in {spec.dialect}")
        spec = spec.with_control(tuple(spec.control) + tuple(extra.control))
    if spec.dialect != dialect_of(cfg.method):
        raise ConfigError(f"method {cfg.method} needs a {dialect_of(cfg.method)} specification, "
                          f"got {spec.dialect}")
    if cfg.solver_cfg is not None and cfg.solver_cfg.discount != d.discount:
        d = d.with_discount(cfg.solver_cfg.discount)
    return d, spec


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def apply_control(d: FactoredNMRDP, spec: RewardSpec, control=(), labels=None):
    """E-state generator in which e-states violating control knowledge are dead.

    PLTL control is checked on each e-state's label; FLTL control is
    progressed alongside the rewards and kills a branch once it becomes
    false. Dead e-states are then removed by :func:`prune_dead` (explicit
    solvers) or avoided by LAO*. Control on the structured translation is
    rejected.
    """
    if control:
        spec = spec.with_control(tuple(spec.control) + tuple(control))
    if spec.dialect == "fltl":
        return FltlGenerator(d, spec)
    return PltlGenerator(d, spec, labels)


def _ms(t0):
    return (time.perf_counter() - t0) * 1000.0


def run(cfg: RunConfig) -> RunStats:
    """Run one configuration.

    Cap exhaustion and infeasibility are raised as usual, with the partial
    statistics attached to the exception as ``.stats``.
    """
    cfg.validate()
    d, spec = load_inputs(cfg)
    scfg = cfg.solver_cfg or SolverConfig(d.discount)
    stats = RunStats(cfg.method, cfg.solver, cfg.family or d.name, cfg.n if cfg.n is not None else d.n,
                     cfg.spec_id)
    try:
        _run(cfg, d, spec, scfg, stats)
    except CapExceeded as exc:
        stats.status = "cap"
        if stats.estates is None and exc.count is not None and not isinstance(exc, ExplicitCapExceeded):
            stats.estates = exc.count
        exc.stats = stats
        raise
    except InfeasibleError as exc:
        stats.status = "infeasible"
        exc.stats = stats
        raise
    return stats


def _run(cfg, d, spec, scfg, stats):
    if d.n <= cfg.caps.explicit:
        stats.states = len(d.reachable_states())
    method, solver = cfg.method, cfg.solver
    # preprocessing
    t0 = time.perf_counter()
    labels = fm = None
    if method == "pltlmin":
        labels = pltlmin_preprocess(d, spec)
    elif method in STRUCTURED:
        fm = pltlstr_translate(d, spec, cfg.caps.nodes)
        if method == "pltlstr-a":
            pltlstr_reachability(fm)
    stats.t_pre_ms = _ms(t0) if method != "fltl" else 0.0
    if fm is not None:
        _solve_structured(fm, scfg, stats)
        return
    gen = apply_control(d, spec, labels=labels)
    # expansion; lao-* on a pltl method always goes through an explicit expansion
    explicit = solver in ("vi", "pi") or cfg.expand or method != "fltl"
    m = None
    if explicit:
        t0 = time.perf_counter()
        m = expand(gen, cfg.caps.estates, d.discount)
        if spec.control:
            m = prune_dead(m)
        stats.t_exp_ms = _ms(t0)
        stats.estates = len(m)
        stats.xmdp = m
    t0 = time.perf_counter()
    if solver in ("vi", "pi"):
        sol = (value_iteration if solver == "vi" else policy_iteration)(m, scfg)
        stats.iters = sol.iterations
        stats.v_s0 = sol.v0
        stats.status = "ok" if sol.converged else "not-converged"
        stats.policy_lines = [f"{e}, {a}, {v!r}" for e, (a, v) in enumerate(zip(sol.policy, sol.values))]
    else:
        source = XmdpGenerator(m, spec) if m is not None else gen
        res = lao_star(source, scfg, subroutine=solver[4:], cap=cfg.caps.estates)
        stats.iters = res.iterations
        stats.v_s0 = res.v0
        stats.status = "ok" if res.converged else "not-converged"
        stats.estates = res.expanded  # with an expansion: the part LAO* actually visited
        ids = {k: i for i, k in enumerate(res.keys)}
        stats.policy_lines = [f"{ids[k]}, {a}, {res.values[k]!r}" for k, a in res.policy.items()]
    stats.t_solve_ms = _ms(t0)


def _solve_structured(fm, scfg, stats):
    t0 = time.perf_counter()
    res = spudd_solve(fm, scfg)
    stats.t_solve_ms = _ms(t0)
    names = fm.current_vars
    stats.estates = fm.reach.count(names) if fm.reach is not None else 1 << len(names)
    stats.nodes = len(fm.manager)
    stats.iters = res.iterations
    stats.v_s0 = res.value_at(fm.initial)
    stats.status = "ok" if res.converged else "not-converged"
    stats.policy_dot = res.policy.to_dot("policy")
    stats.policy_lines = [f"value-nodes {res.value_nodes}", f"policy-nodes {res.policy.size}"]


__all__ = [
    "CSV_COLUMNS", "Caps", "METHODS", "RunConfig", "RunStats", "SOLVERS", "apply_control",
    "dialect_of", "load_inputs", "run", "write_csv",
]
