import pytest

from chcfuzz.chc import parse_model, parse_script
from chcfuzz.oracles import (
    CHECK_MODEL, HANDLE_BUG, LOG_INFO, PASS, OracleSolver, check_equivalence, judge,
    validate_model,
)
from chcfuzz.runner import SolverVerdict

from conftest import requires_z3

P = "(set-logic HORN)(declare-fun P (Int) Bool)(declare-fun h () Bool)"


@pytest.mark.parametrize("truth,outcome,decision", [
    ("sat", "sat", CHECK_MODEL),
    ("sat", "unsat", HANDLE_BUG),
    ("unsat", "sat", HANDLE_BUG),
    ("unsat", "unsat", PASS),
    ("sat", "unknown", LOG_INFO),
    ("unsat", "unknown", LOG_INFO),
    ("sat", "timeout", LOG_INFO),
    ("unsat", "crash", HANDLE_BUG),
])
def test_judge(truth, outcome, decision):
    assert judge(truth, outcome) == decision
    assert judge(truth, SolverVerdict(outcome)) == decision


def test_judge_rejects_unknown_truth():
    with pytest.raises(ValueError):
        judge("unknown", "sat")


def _system(*clauses):
    return parse_script(P + "".join(f"(assert {c})" for c in clauses))


@requires_z3
def test_valid_model():
    s = _system("(forall ((x Int)) (=> (> x 0) (P x)))")
    m = parse_model("((define-fun P ((a Int)) Bool (> a 0)))", s)
    assert validate_model(s, m).ok


@requires_z3
def test_model_bug_on_query():
    s = _system("(forall ((x Int)) (=> (> x 0) (P x)))", "(forall ((x Int)) (=> (P x) false))")
    m = parse_model("((define-fun P ((a Int)) Bool true))", s)
    check = validate_model(s, m)
    assert check.is_bug and check.clause == 1
    assert check.witness


@requires_z3
def test_inductive_model_ok():
    s = _system("(forall ((x Int)) (=> (> x 0) (P x)))", "(forall ((x Int)) (=> (P x) (P (+ x 1))))")
    m = parse_model("((define-fun P ((a Int)) Bool (>= a 1)))", s)
    assert validate_model(s, m).ok


@requires_z3
def test_equivalence_examples():
    oracle = OracleSolver()
    base = _system("(forall ((x Int)) (=> (and (> x 0) (P x)) h))")
    assert check_equivalence(base, base, oracle)
    swapped = _system("(forall ((x Int)) (=> (and (P x) (> x 0)) h))")
    assert check_equivalence(base, swapped, oracle)
    f = _system("(forall ((x Int)) (=> (> x 0) h))")
    r = _system("(forall ((x Int)) (=> (>= x 0) h))")
    assert not check_equivalence(f, r, oracle)


def test_equivalence_needs_alignment():
    a = _system("(forall ((x Int)) (=> (> x 0) h))")
    with pytest.raises(ValueError):
        check_equivalence(a, a.with_clauses(()))
