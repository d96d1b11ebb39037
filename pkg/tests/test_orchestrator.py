import json
import shutil

import pytest

from chcfuzz import cli
from chcfuzz.chc import parse_script, print_script
from chcfuzz.mutations import MutationChain, replay
from chcfuzz.orchestrator import Session, SessionConfig, SessionError, fuzz, prepare_seeds
from chcfuzz.scheduler import TransitionStats

from conftest import CORPUS, FAKE, STUB, requires_z3

SAT = "(set-logic HORN)(declare-fun P (Int) Bool)(assert (forall ((x Int)) (=> (> x 0) (P x))))\n"
UNSAT = ("(set-logic HORN)(declare-fun P (Int) Bool)(assert (forall ((x Int)) (P x)))"
         "(assert (forall ((x Int)) (=> (P x) false)))\n")


def runs(out):
    return [json.loads(line) for line in (out / "runs.jsonl").read_text().splitlines()]


def seeds_dir(tmp_path, *names):
    d = tmp_path / "seeds"
    d.mkdir()
    for n in names:
        shutil.copy(CORPUS / f"{n}.smt2", d)
    return d


@requires_z3
def test_prepare_seeds_admission(tmp_path, monkeypatch):
    d = tmp_path / "seeds"
    d.mkdir()
    (d / "a_sat.smt2").write_text(SAT)
    (d / "b_unsat.smt2").write_text(UNSAT)
    (d / "c_slow.smt2").write_text(SAT.replace("(> x 0)", "(> x 12345)"))
    (d / "d_broken.smt2").write_text("(set-logic HORN)(assert")
    monkeypatch.setenv("FAKE_SOLVER_SLOW_ON", "12345")
    st = TransitionStats()
    groups = prepare_seeds(SessionConfig(str(d), solver=str(FAKE), timeout_solve=0.5), st)
    assert [g.seed_id for g in groups] == ["a_sat", "b_unsat"]
    assert st.unique_traces == 1
    real = prepare_seeds(SessionConfig(str(d), timeout_solve=5))
    assert {g.seed_id: g.truth for g in real} == {"a_sat": "sat", "b_unsat": "unsat", "c_slow": "sat"}


def test_no_seeds(tmp_path):
    (tmp_path / "s").mkdir()
    with pytest.raises(SessionError):
        prepare_seeds(SessionConfig(str(tmp_path / "s")))


def test_config_validation():
    with pytest.raises(ValueError):
        SessionConfig("x", workers=0)
    with pytest.raises(ValueError):
        SessionConfig("x", mutations=())
    with pytest.raises(ValueError):
        SessionConfig("x", mutations=("bogus",))


@requires_z3
def test_own_only_and_equiprobable(tmp_path):
    d = seeds_dir(tmp_path, "counter_sat", "two_vars_unsat")
    out = tmp_path / "out"
    summary = fuzz(SessionConfig(str(d), out_dir=str(out), mutations=("own",), equiprobable=True,
                                 random_seed=3), max_runs=40)
    assert summary["runs"] == 40
    assert all(r["mutation"].split(":")[0] not in ("REWRITE", "PARAM_TOGGLE") for r in runs(out))
    assert all(w["weight"] == 0.1 for w in summary["weights"].values())
    snap = json.loads((out / "stats.json").read_text())
    assert snap["runs"] == 40 and snap["unique_traces"] >= snap["baseline_traces"]


@requires_z3
def test_stub_findings_and_replay(tmp_path):
    d = seeds_dir(tmp_path, "counter_sat", "lra_sat")
    out = tmp_path / "out"
    fuzz(SessionConfig(str(d), solver=str(STUB), out_dir=str(out), mutations=("parameters",),
                       random_seed=1), max_runs=12)
    found = sorted((out / "findings").iterdir())
    # every parameter mutant of a sat seed is misjudged; 3 findings retire a group
    assert len(found) == 6
    for f in found:
        assert f.name.startswith("satisfiability-bug-")
        names = {p.name for p in f.iterdir()}
        assert {"seed.smt2", "mutant.smt2", "chain.json", "verdicts.txt", "solver-output.txt"} <= names
        assert "truth: sat\nmutant: unsat" in (f / "verdicts.txt").read_text()
        seed = parse_script((f / "seed.smt2").read_text())
        chain = MutationChain.loads((f / "chain.json").read_text())
        assert print_script(replay(seed, chain)) == (f / "mutant.smt2").read_text()
    groups = json.loads((out / "stats.json").read_text())["groups"]
    assert all(g["retired"] and g["bug_count"] == 3 for g in groups.values())


@requires_z3
def test_cli_fuzz_stats_reduce(tmp_path, capsys):
    d = seeds_dir(tmp_path, "counter_sat")
    out = tmp_path / "out"
    rc = cli.main(["--log-level", "WARNING", "fuzz", str(d), "--solver", str(STUB), "-mutations",
                   "own,parameters", "--out-dir", str(out), "--max-runs", "30", "--seed", "2"])
    assert rc == 0
    assert cli.main(["stats", str(out)]) == 0
    assert "unique traces" in capsys.readouterr().out
    finding = sorted((out / "findings").iterdir())[0]
    assert cli.main(["--log-level", "WARNING", "reduce", str(finding)]) == 0
    reduced = MutationChain.loads((finding / "reduced-chain.json").read_text())
    assert len(reduced) == 1 and reduced.records[0].kind == "PARAM_TOGGLE"
    assert (finding / "reduced.smt2").exists()


def test_cli_bad_args():
    with pytest.raises(SystemExit):
        cli.main(["fuzz", "x", "-mutations", "bogus"])
    with pytest.raises(SystemExit):
        cli.main(["fuzz", "x", "-heuristic", "nope"])


def test_cli_harness_error(tmp_path):
    d = seeds_dir(tmp_path, "counter_sat")
    assert cli.main(["fuzz", str(d), "--solver", "/no/such/solver", "--out-dir", str(tmp_path / "o")]) == 2


def _decisions(tmp_path, name, monkeypatch):
    monkeypatch.setenv("FAKE_SOLVER_TRACE", "unique")
    d = tmp_path / name
    if not d.exists():
        d.mkdir()
        for n in ("counter_unsat", "two_vars_unsat", "ineq_chain_unsat"):
            shutil.copy(CORPUS / f"{n}.smt2", d)
    out = tmp_path / f"out-{name}"
    fuzz(SessionConfig(str(d), solver=str(FAKE), out_dir=str(out), mutations=("own", "parameters"),
                       heuristic="complex", random_seed=11), max_runs=60)
    return [(r["group"], r["mutation"]) for r in runs(out)]


def test_session_determinism(tmp_path, monkeypatch):
    a = _decisions(tmp_path, "a", monkeypatch)
    b = _decisions(tmp_path, "b", monkeypatch)
    assert a == b and len(a) == 60


def test_stagnation_with_fake_solver(tmp_path, monkeypatch):
    monkeypatch.setenv("FAKE_SOLVER_TRACE", "same")
    d = seeds_dir(tmp_path, "counter_unsat", "two_vars_unsat")
    out = tmp_path / "out"
    s = Session(SessionConfig(str(d), solver=str(FAKE), out_dir=str(out), mutations=("parameters",)))
    s.prepare()
    n = len(s.groups[0].seed.clauses)
    s.run(max_runs=5 * n + 3)
    log = runs(out)
    switches = [r for r in log if r["action"] == "switch"]
    assert switches[0]["run"] == 5 * n and switches[0]["reason"] == "stagnation"
    assert log[5 * n]["group"] != log[0]["group"]


def test_rollback_with_fake_solver(tmp_path, monkeypatch):
    monkeypatch.setenv("FAKE_SOLVER_SLOW_ON", "(set-option")
    d = seeds_dir(tmp_path, "counter_unsat")
    out = tmp_path / "out"
    fuzz(SessionConfig(str(d), solver=str(FAKE), out_dir=str(out), mutations=("parameters",),
                       timeout_solve=0.3), max_runs=3)
    log = runs(out)
    assert [r["outcome"] for r in log] == ["timeout"] * 3
    assert log[-1]["action"] == "rollback"
    # the first two timeouts extended the chain, the rollback emptied it
    assert json.loads((out / "stats.json").read_text())["groups"]["counter_unsat"]["chain_length"] == 0
