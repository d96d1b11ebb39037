"""Rules with unsatisfiable premises: adding them keeps satisfiability."""
from __future__ import annotations

import random

from ..chc import ChcClause, ChcSystem, FunDecl
from ..chc.terms import (
    BOOL, FALSE, INT, App, Const, PredApp, Quant, Var, mk_and,
)
from .records import NotApplicable


# name -> (extra Int variables needed, premise builder)
UNSAT_PREMISES: dict = {
    "false": (0, lambda u: FALSE),
    "x!=x": (1, lambda u: App("distinct", (u, u), BOOL)),
    "x<x": (1, lambda u: App("<", (u, u), BOOL)),
    "0=1": (0, lambda u: App("=", (Const("0", INT), Const("1", INT)), BOOL)),
    "x<0&x>0": (1, lambda u: App("and", (App("<", (u, Const("0", INT)), BOOL),
                                        App(">", (u, Const("0", INT)), BOOL)), BOOL)),
}
PREMISE_NAMES = tuple(UNSAT_PREMISES)


def fresh_names(system: ChcSystem, base: str, count: int, taken=()) -> list[str]:
    used = set(system.fun_table) | set(system.pred_table) | set(taken)
    out = []
    k = 0
    while len(out) < count:
        name = f"{base}{k}"
        if name not in used:
            out.append(name)
            used.add(name)
        k += 1
    return out


def _pick_pred(system: ChcSystem, rng: random.Random, name: str | None) -> FunDecl:
    if not system.predicates:
        raise NotApplicable("ADD_LIN_RULE", "no predicates declared")
    if name is None:
        return rng.choice(system.predicates)
    if name not in system.pred_table:
        raise NotApplicable("ADD_LIN_RULE", f"predicate {name} not declared")
    return system.pred_table[name]


def lin_rule(system: ChcSystem, pred: FunDecl, premise: str) -> ChcClause:
    extra, build = UNSAT_PREMISES[premise]
    names = fresh_names(system, "lr_v", len(pred.domain))
    args = tuple(Var(n, s) for n, s in zip(names, pred.domain))
    bound = tuple(zip(names, pred.domain))
    u = None
    if extra:
        (uname,) = fresh_names(system, "lr_u", 1, taken=names)
        u = Var(uname, INT)
        bound += ((uname, INT),)
    return ChcClause(bound, build(u), PredApp(pred.name, args))


def mutate_add_lin_rule(system: ChcSystem, rng: random.Random, choices: dict | None = None):
    """Append ``forall v. U(v) -> P(v)`` with ``U`` from the unsat catalog.

    Returns the new system and the filled choices.
    """
    choices = dict(choices or {})
    pred = _pick_pred(system, rng, choices.get("pred"))
    premise = choices.get("premise") or rng.choice(PREMISE_NAMES)
    if premise not in UNSAT_PREMISES:
        raise ValueError(f"unknown premise {premise!r}")
    clause = lin_rule(system, pred, premise)
    return system.with_clauses(system.clauses + (clause,)), {"pred": pred.name, "premise": premise}


def nonlin_rule(system: ChcSystem, pred: FunDecl, n: int, arg_choices: list[list[int]],
                head_choice: list[int]) -> ChcClause:
    """Build ``forall v. (exists x. AND_i (x_i > x_(i+1 mod n) & P(args_i))) -> P(head)``.

    ``arg_choices[i][j]`` indexes the candidate list for argument ``j`` of the
    i-th body application; candidates are the x's then the v's of that sort.
    """
    m = len(pred.domain)
    v_names = fresh_names(system, "nl_v", m)
    x_names = fresh_names(system, "nl_x", n, taken=v_names)
    vs = [Var(nm, s) for nm, s in zip(v_names, pred.domain)]
    xs = [Var(nm, INT) for nm in x_names]
    pool = xs + vs
    conjuncts = []
    for i in range(n):
        args = []
        for j, sort in enumerate(pred.domain):
            cands = [t for t in pool if t.sort == sort]
            args.append(cands[arg_choices[i][j] % len(cands)])
        gt = App(">", (xs[i], xs[(i + 1) % n]), BOOL)
        conjuncts.append(App("and", (gt, PredApp(pred.name, tuple(args))), BOOL))
    head_args = []
    for j, sort in enumerate(pred.domain):
        cands = [v for v in vs if v.sort == sort]
        head_args.append(cands[head_choice[j] % len(cands)])
    body = Quant("exists", tuple((x.name, INT) for x in xs), mk_and(*conjuncts))
    return ChcClause(tuple(zip(v_names, pred.domain)), body, PredApp(pred.name, tuple(head_args)))


def _candidate_count(pred: FunDecl, sort, n: int, with_x: bool) -> int:
    count = sum(1 for s in pred.domain if s == sort)
    if with_x and sort == INT:
        count += n
    return count


def mutate_add_nonlin_rule(system: ChcSystem, rng: random.Random, choices: dict | None = None):
    choices = dict(choices or {})
    pred = _pick_pred(system, rng, choices.get("pred"))
    if "n" in choices:
        n = int(choices["n"])
        arg_choices = [list(a) for a in choices["args"]]
        head_choice = list(choices["head"])
    else:
        n = rng.randint(1, 10)
        arg_choices = [[rng.randrange(_candidate_count(pred, s, n, True)) for s in pred.domain]
                       for _ in range(n)]
        head_choice = [rng.randrange(_candidate_count(pred, s, n, False)) for s in pred.domain]
    clause = nonlin_rule(system, pred, n, arg_choices, head_choice)
    filled = {"pred": pred.name, "n": n, "args": arg_choices, "head": head_choice}
    return system.with_clauses(system.clauses + (clause,)), filled
