"""CHC clauses and systems."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Union

from .terms import (
    BOOL, FALSE, App, Const, PredApp, Quant, Sort, Term, Var, children,
    free_vars, pred_apps, substitute, walk, with_children,
)

OptionValue = Union[bool, str]


class ChcError(ValueError):
    """Raised for sort errors and for assertions that are not Horn clauses."""

    def __init__(self, message: str, assertion: int | None = None):
        self.assertion = assertion
        if assertion is not None:
            message = f"assertion {assertion}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FunDecl:
    name: str
    domain: tuple[Sort, ...]
    range: Sort


@dataclass(frozen=True)
class ChcClause:
    """``forall bound. body -> head``.

    ``surface`` records how the assertion was written (``implies``, ``or`` or
    ``not-exists``) so printing reproduces the same shape.
    """

    bound: tuple[tuple[str, Sort], ...]
    body: Term
    head: Term
    surface: str = "implies"

    @property
    def is_query(self) -> bool:
        return self.head == FALSE

    def body_preds(self) -> list[PredApp]:
        return pred_apps(self.body)


@dataclass(frozen=True)
class ClauseClass:
    role: str  # fact | rule | query
    linear: bool


def classify(clause: ChcClause) -> ClauseClass:
    n_preds = len(clause.body_preds())
    if clause.is_query:
        role = "query"
    elif n_preds == 0:
        role = "fact"
    else:
        role = "rule"
    return ClauseClass(role, n_preds <= 1)


@dataclass(frozen=True)
class ChcSystem:
    predicates: tuple[FunDecl, ...] = ()
    functions: tuple[FunDecl, ...] = ()
    clauses: tuple[ChcClause, ...] = ()
    logic: str = "HORN"
    options: tuple[tuple[str, OptionValue], ...] = ()
    sorts: tuple[tuple[str, int], ...] = ()

    @cached_property
    def pred_table(self) -> dict[str, FunDecl]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def fun_table(self) -> dict[str, FunDecl]:
        return {f.name: f for f in self.functions}

    @property
    def is_linear(self) -> bool:
        return all(classify(c).linear for c in self.clauses)

    def with_clauses(self, clauses) -> "ChcSystem":
        return replace(self, clauses=tuple(clauses))

    def with_clause(self, index: int, clause: ChcClause) -> "ChcSystem":
        cl = list(self.clauses)
        cl[index] = clause
        return replace(self, clauses=tuple(cl))

    def with_options(self, options) -> "ChcSystem":
        return replace(self, options=tuple(options))


def _bad_polarity(term: Term, positive: bool = True) -> bool:
    """True if some PredApp sits under odd negation or in a both-polarity
    position (ite condition, boolean equality)."""
    if isinstance(term, PredApp):
        return not positive
    if isinstance(term, (Var, Const)):
        return False
    if isinstance(term, Quant):
        return _bad_polarity(term.body, positive)
    op = term.op
    if op == "not":
        return _bad_polarity(term.args[0], not positive)
    if op in ("and", "or"):
        return any(_bad_polarity(a, positive) for a in term.args)
    if op == "=>":
        return (any(_bad_polarity(a, not positive) for a in term.args[:-1])
                or _bad_polarity(term.args[-1], positive))
    if op == "ite" and term.sort == BOOL:
        if pred_apps(term.args[0]):
            return True
        return any(_bad_polarity(a, positive) for a in term.args[1:])
    # anything else (=, xor, distinct, function args) mixes polarities
    return bool(pred_apps(term))


def validate_clause(clause: ChcClause, system: ChcSystem, index: int | None = None) -> None:
    head = clause.head
    if not (head == FALSE or isinstance(head, PredApp)):
        raise ChcError("clause head is neither a predicate application nor false", index)
    if isinstance(head, PredApp) and any(pred_apps(a) for a in head.args):
        raise ChcError("predicate application nested inside a head argument", index)
    if _bad_polarity(clause.body):
        raise ChcError("predicate application in a negative position of the body", index)
    names = [n for n, _ in clause.bound]
    for _, t in walk(clause.body):
        if isinstance(t, Quant):
            names.extend(n for n, _ in t.bound)
    if len(names) != len(set(names)):
        raise ChcError("bound variable names are not unique within the clause", index)
    bound = {n for n, _ in clause.bound}
    loose = (free_vars(clause.body) | free_vars(head)) - bound
    if loose:
        raise ChcError(f"unbound variables {sorted(loose)}", index)
    for app in pred_apps(clause.body) + ([head] if isinstance(head, PredApp) else []):
        decl = system.pred_table.get(app.pred)
        if decl is None:
            raise ChcError(f"undeclared predicate {app.pred}", index)
        if len(app.args) != len(decl.domain):
            raise ChcError(f"arity mismatch for {app.pred}", index)
        for arg, s in zip(app.args, decl.domain):
            if sort_of(arg) != s and not (sort_of(arg).is_arith and s.is_arith):
                raise ChcError(f"argument sort mismatch for {app.pred}", index)


def validate(system: ChcSystem) -> None:
    if system.logic != "HORN":
        raise ChcError(f"expected logic HORN, got {system.logic}")
    for i, c in enumerate(system.clauses):
        validate_clause(c, system, i)


def sort_of(term: Term) -> Sort:
    return term.sort


def clause_formula(clause: ChcClause) -> Term:
    """The closed formula ``forall bound. body => head``."""
    matrix = App("=>", (clause.body, clause.head), BOOL)
    if not clause.bound:
        return matrix
    return Quant("forall", clause.bound, matrix)


def clause_matrix(clause: ChcClause) -> Term:
    return App("=>", (clause.body, clause.head), BOOL)


@dataclass(frozen=True)
class Definition:
    params: tuple[tuple[str, Sort], ...]
    body: Term
    range: Sort = BOOL


@dataclass(frozen=True)
class Model:
    """Predicate interpretations returned with a sat verdict.

    ``aux`` holds any helper functions the solver defined alongside the
    predicates; they are emitted as ``define-fun`` when the model is checked.
    """

    definitions: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)

    def __hash__(self):
        return hash(tuple(sorted(self.definitions)))


class ModelError(ValueError):
    pass


def instantiate(defn: Definition, args: tuple[Term, ...]) -> Term:
    if len(args) != len(defn.params):
        raise ModelError("arity mismatch between model definition and application")
    return substitute(defn.body, {n: a for (n, _), a in zip(defn.params, args)})


def substitute_model(system: ChcSystem, model: Model) -> list[Term]:
    """Replace every predicate application by the model's definition.

    Returns one closed formula per clause, with no predicate symbols left.
    Predicates that no clause mentions need no definition.
    """
    used = {a.pred for c in system.clauses for t in (c.body, c.head) for a in pred_apps(t)}
    for p in system.predicates:
        if p.name not in used:
            continue
        defn = model.definitions.get(p.name)
        if defn is None:
            raise ModelError(f"model does not define predicate {p.name}")
        if len(defn.params) != len(p.domain):
            raise ModelError(f"arity mismatch for {p.name}")

    def plug(term: Term) -> Term:
        if isinstance(term, PredApp):
            return instantiate(model.definitions[term.pred], tuple(plug(a) for a in term.args))
        kids = children(term)
        if not kids:
            return term
        return with_children(term, tuple(plug(k) for k in kids))

    out = []
    for c in system.clauses:
        body = plug(c.body)
        head = plug(c.head)
        matrix = App("=>", (body, head), BOOL)
        out.append(Quant("forall", c.bound, matrix) if c.bound else matrix)
    return out
