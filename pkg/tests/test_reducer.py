import itertools

import pytest

from chcfuzz.chc import parse_script, print_clause
from chcfuzz.chc.printer import print_term
from chcfuzz.chc.terms import size
from chcfuzz.mutations import MutationChain, MutationRecord, replay, solver_params
from chcfuzz.oracles import OracleSolver, check_clauses_equivalent
from chcfuzz.reducer import Budget, StaleFinding, reduce_chain, reduce_clauses, reduce_system

from conftest import requires_z3

BASE = "(set-logic HORN)(declare-fun P (Int) Bool)(declare-fun h () Bool)"
PARAMS = list(solver_params())


def toggle_chain(n):
    return MutationChain("s", tuple(MutationRecord("PARAM_TOGGLE", i, {"param": PARAMS[i]}) for i in range(n)))


def subset_bug(needed):
    names = {f"fp.{PARAMS[i]}" for i in needed}
    return lambda system: names <= {n for n, _ in system.options}


def brute_minimal(n, bug, seed):
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            chain = toggle_chain(n).subsequence(combo)
            if bug(replay(seed, chain)):
                return list(combo)
    return None


def test_chain_exact_subset():
    seed = parse_script(BASE)
    chain = toggle_chain(8)
    bug = subset_bug({2, 5})
    out = reduce_chain(seed, chain, bug)
    assert [r.choices["param"] for r in out.records] == [PARAMS[2], PARAMS[5]]
    assert brute_minimal(8, bug, seed) == [2, 5]


def test_chain_single_record():
    seed = parse_script(BASE)
    out = reduce_chain(seed, toggle_chain(1), subset_bug({0}))
    assert len(out) == 1


def test_chain_always_true():
    seed = parse_script(BASE)
    assert len(reduce_chain(seed, toggle_chain(6), lambda s: True)) == 0


def test_chain_stale():
    with pytest.raises(StaleFinding):
        reduce_chain(parse_script(BASE), toggle_chain(3), lambda s: False)


def test_chain_one_minimal():
    seed = parse_script(BASE)
    bug = subset_bug({0, 3, 4, 8})
    out = reduce_chain(seed, toggle_chain(10), bug)
    assert bug(replay(seed, out))
    for i in range(len(out)):
        rest = out.subsequence([j for j in range(len(out)) if j != i])
        assert not bug(replay(seed, rest))


def test_chain_budget():
    seed = parse_script(BASE)
    b = Budget(3)
    out = reduce_chain(seed, toggle_chain(8), subset_bug({2, 5}), budget=b)
    assert b.used == 3 and len(out) <= 8


def five_clauses():
    return parse_script(BASE + "".join(
        f"(assert (forall ((x Int)) (=> (= x {i}) (P x))))" for i in range(5)))


def test_clause_deletion():
    s = five_clauses()
    keep = {print_clause(s.clauses[1]), print_clause(s.clauses[4])}
    bug = lambda t: keep <= {print_clause(c) for c in t.clauses}
    out = reduce_clauses(s, bug)
    assert [print_clause(c) for c in out.clauses] == [print_clause(s.clauses[1]), print_clause(s.clauses[4])]


@requires_z3
def test_system_five_clause_case():
    s = five_clauses()
    keep = {print_clause(s.clauses[1]), print_clause(s.clauses[4])}
    out = reduce_system(s, lambda t: keep <= {print_clause(c) for c in t.clauses}, s)
    assert len(out.clauses) == 2


@requires_z3
def test_phase2_drops_true():
    s = parse_script(BASE + "(assert (forall ((x Int)) (=> (and (P x) true) h)))")
    out = reduce_system(s, lambda t: len(t.clauses) == 1, s)
    assert print_term(out.clauses[0].body) == "(P x)"


@requires_z3
def test_phase2_equivalence_gate():
    s = parse_script(BASE + "(assert (forall ((x Int)) (=> (and (> x 0) (P x)) h)))")
    out = reduce_system(s, lambda t: len(t.clauses) == 1, s)
    # dropping (> x 0) would keep the bug but change the clause
    assert out == s


@requires_z3
def test_phase2_removes_mutation_debris():
    s = parse_script(BASE + "(assert (forall ((x Int) (y Int)) "
                            "(=> (and (< x 3) (and (< x 3) (< x 4)) (P x) (P x)) h)))")
    out = reduce_system(s, lambda t: len(t.clauses) == 1, s)
    c = out.clauses[0]
    assert size(c.body) < size(s.clauses[0].body)
    assert [n for n, _ in c.bound] == ["x"]
    assert check_clauses_equivalent(s, [(s.clauses[0], c)], OracleSolver())


def test_system_stale():
    with pytest.raises(StaleFinding):
        reduce_system(five_clauses(), lambda t: False)
