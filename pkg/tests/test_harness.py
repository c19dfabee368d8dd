import csv
import io
import math
import os
import subprocess
import sys

import pytest

from nmrdpp.domain import gen_builtin
from nmrdpp.errors import ConfigError, InfeasibleError
from nmrdpp.harness import cli
from nmrdpp.harness.run import CSV_COLUMNS, Caps, RunConfig, apply_control, run, write_csv
from nmrdpp.harness.simulate import estimate_value, simulate_policy
from nmrdpp.harness.specs import POOL, get_spec, table1_spec
from nmrdpp.harness.suites import SUITES, run_suite, suite_cells
from nmrdpp.logic import RewardSpec
from nmrdpp.logic import formula as F
from nmrdpp.solvers import SolverConfig, value_iteration
from nmrdpp.translate import expand, pltlmin_expand, prune_dead


def first_g(dialect, n):
    return get_spec("ever").build(dialect, n)


# -- run ------------------------------------------------------------------------------

def test_fltl_lao_has_no_preprocessing():
    d = gen_builtin("spudd-linear", 4)
    st = run(RunConfig("fltl", "lao-vi", domain=d, rewards=first_g("fltl", 4)))
    assert st.status == "ok"
    assert st.t_pre_ms == 0.0
    assert st.estates > 0 and st.v_s0 is not None


def test_pltlmin_counts_match_oracle():
    d = gen_builtin("spudd-linear", 4)
    spec = first_g("pltl", 4)
    st = run(RunConfig("pltlmin", "vi", domain=d, rewards=spec))
    assert st.t_pre_ms > 0.0
    assert st.estates == len(pltlmin_expand(d, spec))
    assert st.states == 16


def test_structured_needs_spudd():
    d = gen_builtin("spudd-linear", 2)
    with pytest.raises(ConfigError):
        run(RunConfig("pltlstr", "vi", domain=d, rewards=first_g("pltl", 2)))
    with pytest.raises(ConfigError):
        run(RunConfig("fltl", "spudd", domain=d, rewards=first_g("fltl", 2)))


def test_dialect_mismatch():
    d = gen_builtin("spudd-linear", 2)
    with pytest.raises(ConfigError):
        run(RunConfig("fltl", "vi", domain=d, rewards=first_g("pltl", 2)))


def test_all_methods_agree():
    d = gen_builtin("on-off", 3)
    values = {}
    for method, solver in (("pltlsim", "vi"), ("pltlmin", "pi"), ("fltl", "lao-vi"),
                           ("fltl", "lao-pi"), ("pltlsim", "lao-vi"), ("pltlstr", "spudd"),
                           ("pltlstr-a", "spudd")):
        spec = get_spec("since").build("fltl" if method == "fltl" else "pltl", 3)
        st = run(RunConfig(method, solver, domain=d, rewards=spec))
        assert st.status == "ok"
        values[(method, solver)] = st.v_s0
    assert max(values.values()) - min(values.values()) <= 2e-6


def test_cap_reports_partial_stats():
    d = gen_builtin("complete", 4)
    spec = table1_spec("prv-all", "pltl", 4)
    with pytest.raises(Exception) as err:
        run(RunConfig("pltlsim", "vi", domain=d, rewards=spec, caps=Caps(estates=20)))
    assert err.value.exit_code == 4
    assert err.value.stats.status == "cap"


def test_caps_from_env(monkeypatch):
    monkeypatch.setenv("NMRDPP_CAPS", "estates=50, nodes=1e4")
    caps = Caps.from_env()
    assert caps.estates == 50 and caps.nodes == 10000
    monkeypatch.setenv("NMRDPP_CAPS", "bogus=1")
    with pytest.raises(ConfigError):
        Caps.from_env()


# -- control knowledge ------------------------------------------------------------------

def test_control_true_has_no_effect():
    d = gen_builtin("on-off", 2)
    spec = get_spec("prev").build("pltl", 2)
    plain = expand(apply_control(d, spec), 10_000, d.discount)
    ctl = prune_dead(expand(apply_control(d, spec, [F.TRUE]), 10_000, d.discount))
    assert len(plain) == len(ctl)
    assert value_iteration(plain).v0 == pytest.approx(value_iteration(ctl).v0)


def test_fltl_control_never_visits_p():
    d = gen_builtin("spudd-linear", 3)
    bit = d.state_of({"p2": True})
    reward = [("alw (~p2 | $)", 1.0)]  # p2 pays, so the unconstrained policy goes there
    free = expand(apply_control(d, RewardSpec.from_pairs(reward, "fltl")), 10_000, d.discount)
    assert any(s & bit for s in simulate_policy(free, value_iteration(free).policy, 12).states)
    spec = RewardSpec.from_pairs(reward, "fltl", control=["alw ~p2"])
    m = prune_dead(expand(apply_control(d, spec), 10_000, d.discount))
    sol = value_iteration(m)
    for seed in range(1000):
        ro = simulate_policy(m, sol.policy, 12, seed=seed)
        assert not any(s & bit for s in ro.states)


def test_control_forbidding_start_is_infeasible():
    d = gen_builtin("on-off", 2)
    spec = RewardSpec.from_pairs([("p1", 1.0)], "pltl", control=["p1"])
    with pytest.raises(InfeasibleError):
        run(RunConfig("pltlsim", "vi", domain=d, rewards=spec))


# -- simulation ---------------------------------------------------------------------------

def test_zero_steps_is_start_reward():
    d = gen_builtin("on-off", 2)
    m = pltlmin_expand(d, RewardSpec.from_pairs([("~p1", 3.0)], "pltl"))
    ro = simulate_policy(m, value_iteration(m).policy, 0)
    assert ro.reward == 3.0 and ro.actions == []


def test_deterministic_rollout_matches_value():
    d = gen_builtin("spudd-linear", 3)
    m = pltlmin_expand(d, first_g("pltl", 3))
    sol = value_iteration(m, SolverConfig(0.9, 1e-10))
    steps = 300
    ro = simulate_policy(m, sol.policy, steps)
    tail = 0.9 ** (steps + 1) * 1.0 / 0.1
    assert abs(ro.reward - sol.v0) <= tail + 1e-9


def test_rollouts_are_seeded():
    d = gen_builtin("on-off", 2)
    m = pltlmin_expand(d, get_spec("prev").build("pltl", 2))
    pol = value_iteration(m).policy
    assert simulate_policy(m, pol, 20, seed=3).states == simulate_policy(m, pol, 20, seed=3).states


def test_monte_carlo_within_three_standard_errors():
    d = gen_builtin("on-off", 3)
    spec = get_spec("since").build("pltl", 3)
    m = pltlmin_expand(d, spec)
    sol = value_iteration(m, SolverConfig(0.9, 1e-9))
    mean, se = estimate_value(m, sol.policy, 10_000, 150, seed=1)
    assert abs(mean - sol.v0) <= 3 * se + 0.9 ** 151 / 0.1


def test_simulate_online_generator():
    from nmrdpp.solvers import lao_star
    from nmrdpp.translate import FltlGenerator
    d = gen_builtin("on-off", 2)
    gen = FltlGenerator(d, get_spec("prev").build("fltl", 2))
    res = lao_star(gen, SolverConfig(0.9))
    ro = simulate_policy(gen, res.policy, 5, seed=0)
    assert len(ro.states) == 6


# -- CSV and suites -----------------------------------------------------------------------

def test_csv_schema():
    d = gen_builtin("complete", 2)
    st = run(RunConfig("pltlsim", "vi", domain=d, rewards=first_g("pltl", 2), family="complete",
                       n=2, spec_id="ever"))
    text = write_csv([st])
    assert text.endswith("\r\n")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["family"] == "complete" and rows[0]["status"] == "ok"
    assert float(rows[0]["v_s0"]) == st.v_s0


def test_suite_cells_cover_methods():
    for name in SUITES:
        cells = suite_cells(name, n_max=2, n_max_structured=2)
        assert cells
        methods = {(c.method, c.solver) for c in cells}
        assert ("pltlstr", "spudd") in methods


def test_small_suite_writes_csv(tmp_path):
    rows = run_suite("syntax", str(tmp_path), n_max=2, n_max_structured=2)
    assert all(r.status == "ok" for r in rows)
    with open(tmp_path / "syntax.csv", newline="") as fh:
        got = list(csv.DictReader(fh))
    assert len(got) == len(rows)
    keys = [(r["method"], r["solver"], r["family"], int(r["n"]), r["spec-id"]) for r in got]
    assert keys == sorted(keys)


# -- CLI ---------------------------------------------------------------------------------

def main(*argv):
    return cli.main(list(argv))


def test_cli_solve(capsys):
    assert main("solve", "--family", "on-off", "--n", "2", "--spec", "prev",
                "--method", "pltlmin", "--solver", "vi") == 0
    out = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["method"] == "pltlmin" and rows[0]["status"] == "ok"


def test_cli_exit_codes(tmp_path, capsys):
    assert main("solve", "--family", "on-off", "--n", "2", "--spec", "prev",
                "--method", "pltlstr", "--solver", "vi") == 2
    bad = tmp_path / "bad.dom"
    bad.write_text("variables (p)\naction a p (p (0.5) endaction\n")
    assert main("solve", "--domain", str(bad), "--spec", "prev",
                "--method", "pltlsim", "--solver", "vi") == 3
    assert main("solve", "--family", "complete", "--n", "4", "--spec", "stage-exact",
                "--method", "pltlsim", "--solver", "vi", "--max-estates", "3") == 4
    ctl = tmp_path / "ctl.rew"
    ctl.write_text("dialect pltl\ncontrol : p1\n")
    assert main("solve", "--family", "on-off", "--n", "2", "--spec", "prev", "--control", str(ctl),
                "--method", "pltlsim", "--solver", "vi") == 5
    assert main("solve", "--family", "on-off", "--n", "2", "--spec", "nope",
                "--method", "pltlsim", "--solver", "vi") == 2
    capsys.readouterr()


def test_cli_check_and_expand(tmp_path, capsys):
    assert main("check", "--family", "complete", "--n", "2", "--spec", "since",
                "--method", "pltlstr-a", "--horizon", "4") == 0
    out = tmp_path / "x.txt"
    assert main("expand", "--family", "complete", "--n", "2", "--spec", "since",
                "--method", "fltl", "--out", str(out)) == 0
    assert out.read_text()
    capsys.readouterr()


def test_cli_files_and_oracle(tmp_path, capsys):
    dom = tmp_path / "d.dom"
    assert main("gen-domain", "--family", "random", "--n", "3", "--seed", "4", "--out", str(dom)) == 0
    rew = tmp_path / "r.rew"
    rew.write_text("dialect fltl\nreward first 1 : ~p1 wun (p1 & $)\n")
    pol = tmp_path / "pol.txt"
    assert main("solve", "--domain", str(dom), "--rewards", str(rew), "--method", "fltl",
                "--solver", "lao-pi", "--policy", str(pol)) == 0
    assert pol.read_text().count("\n") >= 1
    trace = tmp_path / "t.txt"
    trace.write_text("% first g at index 1\n-\ng\ng\n")
    capsys.readouterr()
    assert main("oracle", "--formula", "g & ~prv pdi g", "--trace", str(trace)) == 0
    assert capsys.readouterr().out.split() == ["0", "false", "1", "true", "2", "false"]
    assert main("oracle", "--formula", "~g wun (g & $)", "--dialect", "fltl",
                "--trace", str(trace)) == 0
    assert capsys.readouterr().out.split() == ["0", "-", "1", "$", "2", "-"]


def test_cli_module_entry_point():
    env = dict(os.environ)
    out = subprocess.run([sys.executable, "-m", "nmrdpp.harness.cli", "--version"],
                         capture_output=True, text=True, env=env)
    assert out.returncode == 0 and "nmrdpp" in out.stdout


def test_pool_ids_unique():
    ids = [p.id for p in POOL]
    assert len(ids) == len(set(ids)) == 12
    assert not math.isnan(sum(v for p in POOL for _, v in p.pltl))
