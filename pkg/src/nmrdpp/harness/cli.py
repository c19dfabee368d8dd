"""Command-line driver.

Exit codes: 0 success, 1 failed check, 2 configuration error, 3 parse
error, 4 budget exhausted, 5 control knowledge infeasible.
"""
from __future__ import annotations

import argparse
import os
import sys

from .. import __version__
from ..domain.generators import FAMILIES, gen_builtin
from ..domain.parser import parse_domain
from ..errors import ConfigError, NmrdppError
from ..logic.fltl import progress
from ..logic.formula import atoms
from ..logic.parser import parse_formula
from ..logic.pltl import TraceEvaluator
from ..solvers.explicit import SolverConfig
from ..translate.equivalence import check_equivalence
from ..translate.pltlstr import expand_factored, pltlstr_reachability, pltlstr_translate
from ..translate.xmdp import expand, prune_dead
from ..translate.pltl_expand import pltlmin_preprocess
from .run import (
    METHODS, SOLVERS, STRUCTURED, Caps, RunConfig, apply_control, dialect_of, load_inputs, run,
    write_csv,
)
from .specs import get_spec
from .suites import N_MAX_EXPLICIT, N_MAX_STRUCTURED, SUITES, run_suite


def _add_inputs(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--domain", help="domain file")
    src.add_argument("--family", choices=FAMILIES, help="built-in domain family (with --n)")
    p.add_argument("--n", type=int, help="size of the built-in domain")
    rw = p.add_mutually_exclusive_group(required=True)
    rw.add_argument("--rewards", help="reward file")
    rw.add_argument("--spec", help="id of a built-in paired reward spec")
    p.add_argument("--control", help="file of control formulas (same format as rewards)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--discount", type=float, help="overrides the domain's discount")
    p.add_argument("--max-estates", type=int, help="e-state budget")


def _caps(args) -> Caps:
    caps = Caps.from_env()
    if getattr(args, "max_estates", None) is not None:
        caps = Caps(args.max_estates, caps.nodes, caps.explicit)
    return caps


def _config(args, solver="vi") -> RunConfig:
    """Run configuration with the domain already loaded (built-in specs need its size)."""
    if args.family:
        if args.n is None:
            raise ConfigError("--family needs --n")
        try:
            domain = gen_builtin(args.family, args.n, args.discount or 0.9)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        with open(args.domain, encoding="utf-8") as fh:
            domain = parse_domain(fh.read(), name=os.path.basename(args.domain))
    rewards = None
    if args.spec:
        try:
            paired = get_spec(args.spec)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        rewards = paired.build(dialect_of(args.method), domain.n)
    eps = getattr(args, "epsilon", None)
    scfg = SolverConfig(args.discount if args.discount is not None else domain.discount,
                        eps if eps is not None else 1e-6)
    return RunConfig(args.method, solver, domain=domain, rewards=rewards,
                     rewards_path=args.rewards, control_path=args.control, solver_cfg=scfg,
                     caps=_caps(args), family=args.family or domain.name, n=domain.n,
                     spec_id=args.spec or "")


def _expanded(args):
    """Domain, spec and full expansion selected by the common input options."""
    cfg = _config(args)
    d, spec = load_inputs(cfg)
    caps = cfg.caps
    if args.method in STRUCTURED:
        fm = pltlstr_translate(d, spec, caps.nodes)
        if args.method == "pltlstr-a":
            pltlstr_reachability(fm)
        return d, spec, expand_factored(fm, caps.estates)
    labels = pltlmin_preprocess(d, spec) if args.method == "pltlmin" else None
    m = expand(apply_control(d, spec, labels=labels), caps.estates, d.discount)
    if spec.control:
        m = prune_dead(m)
    return d, spec, m


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_solve(args) -> int:
    cfg = _config(args, args.solver)
    cfg.expand = args.expand
    stats = run(cfg)
    _write(args.stats or "-", write_csv([stats]))
    if args.policy:
        _write(args.policy, stats.policy_dot if stats.policy_dot is not None else stats.policy_text())
    return 0


def cmd_expand(args) -> int:
    _, _, m = _expanded(args)
    _write(args.out, m.dump())
    sys.stderr.write(f"{len(m)} e-states\n")
    return 0


def cmd_gen_domain(args) -> int:
    params = {}
    if args.family == "random":
        params = {"seed": args.seed, "structure": args.structure, "uncertainty": args.uncertainty}
    try:
        d = gen_builtin(args.family, args.n, args.discount, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _write(args.out, d.dump())
    return 0


def cmd_check(args) -> int:
    d, spec, m = _expanded(args)
    rep = check_equivalence(d, m, args.horizon, spec, pruned=bool(spec.control))
    print(f"{args.method}: {len(m)} e-states, {rep}")
    return 0 if rep.ok else 1


def cmd_suite(args) -> int:
    def report(s):
        if args.verbose:
            sys.stderr.write(f"{s.method},{s.solver},{s.family},{s.n},{s.spec_id}: {s.status}\n")

    rows = run_suite(args.name, args.out, args.n_max, args.n_max_structured, _caps(args),
                     args.discount, progress=report)
    bad = sum(1 for r in rows if r.status != "ok")
    print(f"{args.name}: {len(rows)} runs, {bad} not ok, written to "
          f"{os.path.join(args.out, args.name + '.csv')}")
    return 0


def read_trace(text: str) -> list[set[str]]:
    """One state per line listing its true propositions; ``-`` for none; ``%`` comments."""
    out = []
    for raw in text.splitlines():
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        out.append(set() if line == "-" else set(line.replace(",", " ").split()))
    return out


def cmd_oracle(args) -> int:
    phi = parse_formula(args.formula, args.dialect)
    with open(args.trace, encoding="utf-8") as fh:
        trace = read_trace(fh.read())
    names = atoms(phi).union(*trace)
    vals = [{p: p in s for p in names} for s in trace]
    if args.dialect == "pltl":
        ev = TraceEvaluator()
        for i, v in enumerate(vals):
            ev.push(v)
            print(f"{i} {'true' if ev.holds(phi) else 'false'}")
    else:
        cur = phi
        for i, v in enumerate(vals):
            cur, hit = progress(cur, v)
            print(f"{i} {'$' if hit else '-'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nmrdpp", description="Decision processes with temporal rewards.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="translate and solve; prints a CSV stats row")
    _add_inputs(s)
    s.add_argument("--solver", required=True, choices=SOLVERS)
    s.add_argument("--epsilon", type=float, help="target precision (default 1e-6)")
    s.add_argument("--expand", action="store_true", help="run lao-* over a full expansion")
    s.add_argument("--stats", help="write the stats CSV here instead of stdout")
    s.add_argument("--policy", help="write the policy (lines 'e-state, action, value', or DOT)")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("expand", help="write the expanded MDP dump")
    _add_inputs(e)
    e.add_argument("--out", default="-", help="output file (default stdout)")
    e.set_defaults(func=cmd_expand)

    g = sub.add_parser("gen-domain", help="write a generated domain file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--structure", type=float, default=0.5)
    g.add_argument("--uncertainty", type=float, default=0.5)
    g.add_argument("--discount", type=float, default=0.9)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen_domain)

    c = sub.add_parser("check", help="check a translation for equivalence")
    _add_inputs(c)
    c.add_argument("--horizon", type=int, default=6)
    c.set_defaults(func=cmd_check)

    u = sub.add_parser("suite", help="run an experiment suite into a CSV file")
    u.add_argument("--name", required=True, choices=SUITES)
    u.add_argument("--out", required=True, help="output directory")
    u.add_argument("--n-max", type=int, default=N_MAX_EXPLICIT)
    u.add_argument("--n-max-structured", type=int, default=N_MAX_STRUCTURED)
    u.add_argument("--discount", type=float, default=0.9)
    u.add_argument("--max-estates", type=int)
    u.add_argument("-v", "--verbose", action="store_true")
    u.set_defaults(func=cmd_suite)

    o = sub.add_parser("oracle", help="evaluate a formula along a trace file")
    o.add_argument("--formula", required=True)
    o.add_argument("--trace", required=True)
    o.add_argument("--dialect", choices=("pltl", "fltl"), default="pltl")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NmrdppError as exc:
        sys.stderr.write(f"nmrdpp: {exc}\n")
        stats = getattr(exc, "stats", None)
        if stats is not None and args.command == "solve":
            _write(args.stats or "-", write_csv([stats]))
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"nmrdpp: {exc}\n")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
