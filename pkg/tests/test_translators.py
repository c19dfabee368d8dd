import random
from collections import Counter

import pytest

from nmrdpp.domain import gen_builtin
from nmrdpp.errors import ConfigError, EstateBudgetExceeded
from nmrdpp.harness.specs import POOL, SINGLE_REWARD_IDS, get_spec, guard_spec
from nmrdpp.logic import RewardSpec
from nmrdpp.logic import formula as F
from nmrdpp.translate import (
    FltlGenerator, check_equivalence, expand, expand_factored, fltl_expand, pltlmin_expand,
    pltlmin_preprocess, pltlsim_expand, pltlstr_reachability, pltlstr_translate, quotient_size,
)

from helpers import random_fltl, random_pltl

FAMILIES = ("spudd-linear", "spudd-expon", "on-off", "complete")


def pltl(text, v=1.0):
    return RewardSpec.from_pairs([(text, v)], "pltl")


def fltl(text, v=1.0):
    return RewardSpec.from_pairs([(text, v)], "fltl")


def per_state(m):
    return Counter(m.state)


def flip_domain():
    """One proposition ``g`` and an action that flips it."""
    from nmrdpp.domain import parse_domain
    return parse_domain("variables (g)\naction flip\n  g (g (0.0) (1.0))\nendaction\n"
                        "action stay\n  g (g (1.0) (0.0))\nendaction\n")


# -- PLTLSIM ---------------------------------------------------------------------

def test_sim_constant_reward_is_isomorphic():
    d = gen_builtin("complete", 3)
    m = pltlsim_expand(d, pltl("true"))
    assert len(m) == len(d.reachable_states())
    assert set(m.reward) == {1.0}


def test_sim_first_time_g_adds_one_bit():
    d = flip_domain()
    m = pltlsim_expand(d, pltl("g & ~prv pdi g"))
    assert max(per_state(m).values()) <= 2
    assert check_equivalence(d, m, 6).ok


def test_sim_two_steps_of_history():
    d = gen_builtin("complete", 2)
    m = pltlsim_expand(d, pltl("prv^2 true"))
    assert max(per_state(m).values()) <= 3
    assert check_equivalence(d, m, 6, pltl("prv^2 true")).ok


# -- PLTLMIN ---------------------------------------------------------------------

def test_min_markovian_labels():
    d = gen_builtin("on-off", 2)
    spec = pltl("p1")
    labels = pltlmin_preprocess(d, spec)
    assert all(set(fs) <= {F.atom("p1")} for fs in labels.values())
    assert len(pltlmin_expand(d, spec)) == len(d.reachable_states())


def test_min_unreachable_trigger():
    for n in (2, 3, 4):
        d = gen_builtin("spudd-linear", n).add_inert_propositions(["c"])
        m = pltlmin_expand(d, guard_spec("pltl", n, "c", f"p{n}"))
        assert len(m) == len(d.reachable_states())


def test_min_two_step_history_classes():
    d = gen_builtin("complete", 2)
    spec = pltl("prv^2 true")
    labels = pltlmin_preprocess(d, spec)
    assert len({frozenset(v) for v in labels.values()}) == 1
    m = pltlmin_expand(d, spec, labels)
    assert max(per_state(m).values()) <= 3
    assert len(m) == quotient_size(pltlsim_expand(d, spec))


@pytest.mark.parametrize("family", FAMILIES)
def test_min_is_minimal(family):
    for n in (1, 2, 3):
        d = gen_builtin(family, n)
        for sid in SINGLE_REWARD_IDS:
            spec = get_spec(sid).build("pltl", n)
            sim, mn = pltlsim_expand(d, spec), pltlmin_expand(d, spec)
            assert len(mn) <= len(sim)
            assert len(mn) == quotient_size(sim), (sid, n)


# -- FLTL ------------------------------------------------------------------------

def test_fltl_always_dollar_reproduces_graph():
    d = gen_builtin("on-off", 3)
    m = fltl_expand(d, fltl("alw $"))
    assert len(m) == len(d.reachable_states())
    assert set(m.reward) == {1.0}


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fltl_next_k_dollar_bound(k):
    d = gen_builtin("complete", 2)
    m = fltl_expand(d, fltl(f"next^{k} $"))
    # stages 0 .. k-1, the rewarded stage k and everything after it; the
    # stage-0 start e-state is the one extra over (k + 1) classes per state
    assert len(m) == quotient_size(m)
    assert len(m) <= (k + 1) * len(d.reachable_states()) + 1


def test_fltl_generator_is_online():
    d = gen_builtin("spudd-linear", 3)
    gen = FltlGenerator(d, fltl("~p3 wun (p3 & $)"))
    k0 = gen.initial()
    assert gen.state(k0) == d.initial
    for a in gen.actions:
        for k, p in gen.successors(k0, a):
            assert p > 0 and gen.state(k) in dict(d.successors(d.initial, a))


def test_unreachable_goal_lao_not_larger():
    from nmrdpp.solvers import SolverConfig, lao_star
    d = gen_builtin("spudd-linear", 4).add_inert_propositions(["g"])
    spec = guard_spec("fltl", 4, "p1", "g")
    res = lao_star(FltlGenerator(d, spec), SolverConfig(0.9))
    assert res.expanded <= len(fltl_expand(d, spec))


# -- PLTLSTR ---------------------------------------------------------------------

def test_str_prev_variable():
    d = gen_builtin("on-off", 1)
    fm = pltlstr_translate(d, pltl("prv p1"))
    assert fm.temporal_vars == ["t#1"]
    assert fm.cpt["on_p1"]["t#1"] == fm.manager.var("p1")
    assert fm.reward == fm.manager.var("t#1")


def test_str_once_variable():
    d = gen_builtin("on-off", 1)
    fm = pltlstr_translate(d, pltl("pdi p1"))
    m = fm.manager
    cur = m.var("p1") | m.var("t#1")
    assert fm.temporal_vars == ["t#1"]
    assert fm.cpt["off_p1"]["t#1"] == cur
    assert fm.reward == cur


def test_str_temporal_dynamics_are_deterministic():
    d = gen_builtin("complete", 3)
    for paired in POOL:
        fm = pltlstr_translate(d, paired.build("pltl", 3))
        for a in fm.actions:
            for t in fm.temporal_vars:
                assert set(fm.cpt[a][t].leaves()) <= {0.0, 1.0}
                assert fm.cpt[a][t].support() <= set(fm.current_vars)


def test_str_reachability_on_complete():
    d = gen_builtin("complete", 2)
    fm = pltlstr_reachability(pltlstr_translate(d, pltl("prv p1")))
    m = expand_factored(fm)
    # every state assignment, each with the temporal value that history allows
    assert fm.reach.count(fm.current_vars) == len(m) == 8


def test_str_reachability_shrinks_expon_support():
    d = gen_builtin("spudd-expon", 4)
    spec = pltl("prv^2 true & ~prv^3 true")
    fm = pltlstr_reachability(pltlstr_translate(d, spec))
    assert fm.reach.count(fm.current_vars) < 2 ** len(fm.current_vars)


def test_str_rejects_control_and_fltl():
    d = gen_builtin("complete", 2)
    with pytest.raises(ConfigError):
        pltlstr_translate(d, RewardSpec.from_pairs([("p1", 1.0)], "pltl", control=["~p2"]))
    with pytest.raises(ConfigError):
        pltlstr_translate(d, fltl("alw $"))


# -- equivalence checker and fuzzing ----------------------------------------------

def translations(d, paired):
    n = d.n
    spec = paired.build("pltl", n)
    yield "sim", pltlsim_expand(d, spec), spec
    yield "min", pltlmin_expand(d, spec), spec
    yield "str", expand_factored(pltlstr_translate(d, spec)), spec
    fs = paired.build("fltl", n)
    yield "fltl", fltl_expand(d, fs), fs


@pytest.mark.parametrize("family", FAMILIES)
def test_pool_equivalence(family):
    for n in (1, 2):
        d = gen_builtin(family, n)
        for paired in POOL:
            for name, m, spec in translations(d, paired):
                rep = check_equivalence(d, m, 5, spec)
                assert rep.ok, (name, paired.id, str(rep))


def test_fault_injection():
    d = gen_builtin("on-off", 2)
    spec = get_spec("prev").build("pltl", 2)
    m = pltlsim_expand(d, spec)
    e = next(i for i, r in enumerate(m.reward) if r == 1.0)
    m.reward[e] = 0.0
    rep = check_equivalence(d, m, 6, spec)
    assert not rep.ok and rep.item == 4 and rep.trace


def test_fault_injection_start_state():
    d = gen_builtin("on-off", 2)
    m = pltlsim_expand(d, pltl("p1"))
    m.state[m.start] = 3
    assert check_equivalence(d, m, 3).item == 1


def test_markovian_identity():
    d = gen_builtin("complete", 2)
    m = pltlsim_expand(d, pltl("p1 & ~p2"))
    assert check_equivalence(d, m, 6, pltl("p1 & ~p2")).ok
    assert len(m) == len(d.reachable_states())


def test_determinism_and_renaming():
    d = gen_builtin("complete", 2)
    spec = get_spec("since").build("pltl", 2)
    a, b = pltlmin_expand(d, spec), pltlmin_expand(d, spec)
    assert a.state == b.state and a.reward == b.reward
    # renaming propositions does not change the sizes
    from nmrdpp.domain import parse_domain
    text = d.dump().replace("p1", "zz").replace("p2", "p1").replace("zz", "p2")
    d2 = parse_domain(text)
    spec2 = pltl("p1 snc p2")
    assert len(pltlmin_expand(d2, spec2)) == len(a)
    assert len(pltlsim_expand(d2, spec2)) == len(pltlsim_expand(d, spec))


def test_budget():
    d = gen_builtin("complete", 4)
    with pytest.raises(EstateBudgetExceeded):
        pltlsim_expand(d, pltl("prv^4 (p1 & p2 & p3 & p4)"), cap=10)


@pytest.mark.parametrize("family", FAMILIES)
def test_random_formula_fuzz(family):
    rng = random.Random(hash(family) & 0xFFFF)
    d = gen_builtin(family, 2)
    for _ in range(25):
        spec = pltl(str(random_pltl(rng, ("p1", "p2"), 3)))
        for m in (pltlsim_expand(d, spec), pltlmin_expand(d, spec),
                  expand_factored(pltlstr_translate(d, spec))):
            rep = check_equivalence(d, m, 5, spec)
            assert rep.ok, (str(spec.entries[0].formula), str(rep))
        fs = fltl(str(random_fltl(rng, ("p1", "p2"), 3, dollar=True)))
        rep = check_equivalence(d, fltl_expand(d, fs), 5, fs)
        assert rep.ok, (str(fs.entries[0].formula), str(rep))


def test_nested_since_terminates():
    # regressions of this formula grow without bound unless stored modulo boolean equivalence
    d = gen_builtin("on-off", 2)
    spec = pltl("((p1 snc p1) snc (p2 & p2)) snc ((p2 snc p2) snc p1)")
    m = pltlmin_expand(d, spec)
    assert check_equivalence(d, m, 5, spec).ok


def test_control_pruning():
    from nmrdpp.harness.run import apply_control
    from nmrdpp.translate import prune_dead
    d = gen_builtin("on-off", 2)
    spec = RewardSpec.from_pairs([("p2", 1.0)], "pltl", control=["~p1"])
    m = prune_dead(expand(apply_control(d, spec), 1000, d.discount))
    assert all(not (s & 1) for s in m.state)
    assert check_equivalence(d, m, 4, spec, pruned=True).ok
