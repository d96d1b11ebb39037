import random

import pytest

from chcfuzz.chc import parse_script, print_clause, print_script, validate
from chcfuzz.chc.printer import print_term
from chcfuzz.chc.terms import App, BOOL, INT, Quant, Var
from chcfuzz.mutations import (
    KINDS, MutationChain, MutationRecord, NotApplicable, apply, identifiers, mutate_add_ineq,
    mutate_add_lin_rule, mutate_add_nonlin_rule, mutate_break_and, mutate_dup_and,
    mutate_mix_bound_vars, mutate_param_toggle, mutate_rewrite, mutate_swap_and, mutate_swap_or,
    record_for, replay, solver_params,
)
from chcfuzz.mutations.rules import PREMISE_NAMES, UNSAT_PREMISES, nonlin_rule
from chcfuzz.mutations.structural import is_ineq_site
from chcfuzz.oracles import OracleSolver, Query, check_equivalence
from chcfuzz.runner import SolverConfig, solve

from conftest import requires_z3

HEAD = "(set-logic HORN)(declare-fun a () Bool)(declare-fun b () Bool)(declare-fun c () Bool)" \
       "(declare-fun P (Int) Bool)(declare-fun h () Bool)"


def one(body: str, bound="((x Int))"):
    return parse_script(HEAD + f"(assert (forall {bound} (=> {body} h)))")


def body(system, i=0):
    return print_term(system.clauses[i].body)


def test_swap_and():
    s = one("(and a b)")
    out = mutate_swap_and(s, (0, ()), (0, 1))
    assert body(out) == "(and b a)"
    assert mutate_swap_and(out, (0, ()), (0, 1)) == s


def test_swap_or():
    s = one("(and (or a b) (P x))")
    assert body(mutate_swap_or(s, (0, (0,)), (0, 1))) == "(and (or b a) (P x))"


def test_dup_and():
    s = one("(and a b)")
    assert body(mutate_dup_and(s, (0, ()), 0)) == "(and a b a)"


def test_break_and():
    s = one("(and a b c)")
    assert body(mutate_break_and(s, (0, ()), 1)) == "(and a (and b c))"
    with pytest.raises(NotApplicable):
        mutate_break_and(one("(and a b)"), (0, ()), 1)


def test_swap_on_non_conjunction():
    with pytest.raises(NotApplicable):
        mutate_swap_and(one("(or a b)"), (0, ()), (0, 1))


def test_mix_bound_vars():
    s = one("(and (P x) (P y) (P z))", "((x Int) (y Int) (z Int))")
    c = s.clauses[0]
    out = mutate_mix_bound_vars(c, [1, 2, 0])
    assert [n for n, _ in out.bound] == ["y", "z", "x"]
    assert out.body == c.body
    assert mutate_mix_bound_vars(c, [0, 1, 2]) == c
    with pytest.raises(NotApplicable):
        mutate_mix_bound_vars(one("(P x)").clauses[0], [0])


def _ineq(text):
    s = one(text)
    return s.clauses[0].body


def test_add_ineq_directions():
    assert print_term(mutate_add_ineq(_ineq("(< x 7)"))) == "(and (< x 7) (< x 8))"
    assert print_term(mutate_add_ineq(_ineq("(> x 5)"))) == "(and (> x 5) (> x 4))"
    assert print_term(mutate_add_ineq(_ineq("(<= 3 x)"))) == "(and (<= 3 x) (<= 2 x))"
    assert print_term(mutate_add_ineq(_ineq("(>= 0 x)"))) == "(and (>= 0 x) (>= 1 x))"
    assert print_term(mutate_add_ineq(_ineq("(< x (- 1))"))) == "(and (< x (- 1)) (< x 0))"
    with pytest.raises(NotApplicable):
        mutate_add_ineq(_ineq("(< x x)"))


def test_add_ineq_real():
    s = parse_script("(set-logic HORN)(declare-fun h () Bool)"
                     "(assert (forall ((r Real)) (=> (< r 2.5) h)))")
    assert print_term(mutate_add_ineq(s.clauses[0].body)) == "(and (< r 2.5) (< r 3.5))"


@requires_z3
def test_add_ineq_equivalent_by_oracle():
    s = one("(and (<= 3 x) (P x))")
    out, _ = apply(s, MutationRecord("ADD_INEQ", 1))
    assert "(<= 2 x)" in body(out)
    assert check_equivalence(s, out)


def test_param_toggle():
    s = one("a")
    out, filled = mutate_param_toggle(s, random.Random(0), {"param": "xform.slice"})
    assert out.options == (("fp.xform.slice", False),)
    assert out.clauses == s.clauses
    assert [print_clause(c) for c in out.clauses] == [print_clause(c) for c in s.clauses]
    out2, _ = mutate_param_toggle(s, random.Random(0), {"param": "spacer.ctp"})
    assert out2.options == (("fp.spacer.ctp", not solver_params()["spacer.ctp"]),)
    with pytest.raises(NotApplicable):
        mutate_param_toggle(out, random.Random(0), {"param": "xform.slice"})


def test_param_toggle_exhausts_catalog():
    s = one("a")
    rng = random.Random(3)
    for _ in range(len(solver_params())):
        s, _ = mutate_param_toggle(s, rng)
    assert len({n for n, _ in s.options}) == len(solver_params())
    with pytest.raises(NotApplicable):
        mutate_param_toggle(s, rng)


def test_param_toggle_replay():
    s = one("a")
    out, rec = apply(s, MutationRecord("PARAM_TOGGLE", 42))
    again, _ = apply(s, rec)
    assert again.options == out.options


def test_lin_rule_shapes():
    s = one("(P x)")
    out, filled = mutate_add_lin_rule(s, random.Random(0), {"pred": "P", "premise": "x!=x"})
    rule = out.clauses[-1]
    assert len(out.clauses) == len(s.clauses) + 1
    assert print_term(rule.body).startswith("(distinct ")
    assert rule.head.pred == "P"
    out, _ = mutate_add_lin_rule(s, random.Random(0), {"pred": "P", "premise": "false"})
    assert print_clause(out.clauses[-1]) == "(forall ((lr_v0 Int)) (=> false (P lr_v0)))"


def test_lin_rule_needs_predicate():
    s = parse_script("(set-logic HORN)(assert (=> true false))")
    with pytest.raises(NotApplicable):
        mutate_add_lin_rule(s, random.Random(0))


@requires_z3
def test_premise_catalog_unsat():
    s = one("(P x)")
    oracle = OracleSolver()
    for name in PREMISE_NAMES:
        out, _ = mutate_add_lin_rule(s, random.Random(0), {"pred": "P", "premise": name})
        rule = out.clauses[-1]
        assert oracle.check(out, [Query(rule.bound, rule.body)]) == ["unsat"], name
    assert set(PREMISE_NAMES) == set(UNSAT_PREMISES)


def test_nonlin_rule_n1():
    s = one("(P x)")
    rule = nonlin_rule(s, s.pred_table["P"], 1, [[0]], [0])
    assert isinstance(rule.body, Quant) and rule.body.kind == "exists"
    assert print_term(rule.body) == "(exists ((nl_x0 Int)) (and (> nl_x0 nl_x0) (P nl_x0)))"
    assert rule.head.pred == "P"


def test_nonlin_rule_cycle():
    s = one("(P x)")
    rule = nonlin_rule(s, s.pred_table["P"], 3, [[0], [1], [3]], [0])
    text = print_term(rule.body)
    for pair in ("(> nl_x0 nl_x1)", "(> nl_x1 nl_x2)", "(> nl_x2 nl_x0)"):
        assert pair in text
    assert "(P nl_v0)" in text  # candidate 3 is the first v


def test_nonlin_n_range():
    s = one("(P x)")
    seen = set()
    for seed in range(200):
        _, filled = mutate_add_nonlin_rule(s, random.Random(seed))
        seen.add(filled["n"])
    assert seen == set(range(1, 11))


@requires_z3
def test_nonlin_premise_unsat_and_verdict_kept(corpus):
    s = corpus["counter_sat"]
    oracle = OracleSolver()
    for seed in range(5):
        out, _ = mutate_add_nonlin_rule(s, random.Random(seed))
        rule = out.clauses[-1]
        assert oracle.check(out, [Query(rule.bound, rule.body)]) == ["unsat"]
        assert solve(out, SolverConfig(timeout=10)).verdict.outcome == "sat"


@requires_z3
def test_rewrite_empty_simplify():
    s = one("(and a true)")
    assert body(mutate_rewrite(s, "empty_simplify")) == "a"


@requires_z3
def test_rewrite_elim_and_equivalent():
    # top-level conjuncts come back as separate goal formulas and are
    # re-conjoined, so test on a nested conjunction
    s = one("(and (or a (and b (> x 0))) (P x))")
    out = mutate_rewrite(s, "elim_and")
    assert "(and b" not in body(out)
    assert check_equivalence(s, out)


@requires_z3
def test_rewrite_fixpoint():
    s = one("(P x)")
    out, rec = apply(s, MutationRecord("REWRITE", 0, {"param": "empty_simplify"}))
    assert out == s and rec.identifier == "REWRITE:empty_simplify"


def test_rewrite_service_failure_not_applicable():
    from chcfuzz.mutations import RewriteConfig
    with pytest.raises(NotApplicable):
        mutate_rewrite(one("a"), "elim_and", RewriteConfig(path="false"))


def test_record_json_roundtrip():
    rec = MutationRecord("SWAP_AND", 2**63 + 5, {"clause": 0, "path": [1, 2], "positions": [0, 1]})
    assert MutationRecord.from_json(rec.to_json()) == rec
    chain = MutationChain("seed", (rec, MutationRecord("PARAM_TOGGLE", 1, {"param": "xform.slice"})))
    assert MutationChain.loads(chain.dumps()) == chain


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        MutationRecord("DUP_OR", 0)


def test_record_for_identifier():
    assert record_for("REWRITE:elim_and", 7).choices == {"param": "elim_and"}
    assert record_for("SWAP_AND", 7).choices == {}
    assert len(identifiers("own")) == 8


OWN_KINDS = [k for k in KINDS if k not in ("REWRITE",)]


@pytest.mark.parametrize("kind", OWN_KINDS)
def test_apply_replay_deterministic(kind, corpus):
    hits = 0
    for name, s in corpus.items():
        for seed in range(3):
            try:
                out, rec = apply(s, MutationRecord(kind, seed))
            except NotApplicable:
                continue
            hits += 1
            validate(out)
            again, rec2 = apply(s, rec)
            assert print_script(again) == print_script(out)
            assert rec2 == rec
            # a fresh record with the same seed draws the same choices
            assert apply(s, MutationRecord(kind, seed))[1] == rec
    assert hits > 0


def test_replay_chain(corpus):
    s = corpus["two_vars_sat"]
    rng = random.Random(5)
    chain = MutationChain("two_vars_sat")
    cur = s
    for _ in range(15):
        rec = record_for(rng.choice(identifiers("own") + identifiers("parameters")), rng.getrandbits(64))
        try:
            cur, filled = apply(cur, rec)
        except NotApplicable:
            continue
        chain = chain.append(filled)
    assert len(chain) > 5
    assert print_script(replay(s, chain)) == print_script(cur)
    assert print_script(replay(s, MutationChain.loads(chain.dumps()))) == print_script(cur)


def test_site_selection_uniform():
    # four eligible conjunctions; each should be picked about equally often
    s = parse_script(HEAD + "".join(
        f"(assert (forall ((x Int)) (=> (and a (> x {i})) h)))" for i in range(4)))
    counts = [0] * 4
    for seed in range(2000):
        _, rec = apply(s, MutationRecord("SWAP_AND", seed))
        counts[rec.choices["clause"]] += 1
    assert all(400 <= c <= 600 for c in counts), counts


def test_ineq_site_predicate():
    x = Var("x", INT)
    assert not is_ineq_site(App("<", (x, x), BOOL))
