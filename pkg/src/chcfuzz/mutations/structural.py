"""In-process, clause-equivalence-preserving mutations.

Sites are addressed as ``(clause index, path)`` where ``path`` indexes into
the clause *body*; only bodies are ever edited here.
"""
from __future__ import annotations

from decimal import Decimal

from ..chc import ChcClause, ChcSystem
from ..chc.terms import (
    BOOL, INT, REAL, App, Const, Term, Var, replace_at, subterm, walk,
)
from .records import NotApplicable

Site = tuple[int, tuple[int, ...]]

_CMP = ("<", "<=", ">", ">=")


def body_sites(system: ChcSystem, pred) -> list[Site]:
    """All body subterms satisfying ``pred``, in clause then pre-order."""
    out = []
    for ci, clause in enumerate(system.clauses):
        for path, t in walk(clause.body):
            if pred(t):
                out.append((ci, path))
    return out


def nary(op: str, min_args: int):
    return lambda t: isinstance(t, App) and t.op == op and len(t.args) >= min_args


def and_sites(system: ChcSystem, min_args: int = 2) -> list[Site]:
    return body_sites(system, nary("and", min_args))


def or_sites(system: ChcSystem, min_args: int = 2) -> list[Site]:
    return body_sites(system, nary("or", min_args))


def _edit(system: ChcSystem, site: Site, op: str, min_args: int, fn) -> ChcSystem:
    ci, path = site
    clause = system.clauses[ci]
    node = subterm(clause.body, tuple(path))
    if not (isinstance(node, App) and node.op == op):
        raise NotApplicable(op, f"site {site} is not an '{op}' node")
    if len(node.args) < min_args:
        raise NotApplicable(op, f"'{op}' at {site} has fewer than {min_args} operands")
    new_node = fn(node)
    body = replace_at(clause.body, tuple(path), new_node)
    return system.with_clause(ci, ChcClause(clause.bound, body, clause.head, clause.surface))


def _swap(node: App, i: int, j: int) -> App:
    if i == j or not (0 <= i < len(node.args) and 0 <= j < len(node.args)):
        raise NotApplicable(node.op, f"bad swap positions {i}, {j}")
    args = list(node.args)
    args[i], args[j] = args[j], args[i]
    return App(node.op, tuple(args), node.sort)


def mutate_swap_and(system: ChcSystem, site: Site, choice: tuple[int, int]) -> ChcSystem:
    return _edit(system, site, "and", 2, lambda n: _swap(n, *choice))


def mutate_swap_or(system: ChcSystem, site: Site, choice: tuple[int, int]) -> ChcSystem:
    return _edit(system, site, "or", 2, lambda n: _swap(n, *choice))


def mutate_dup_and(system: ChcSystem, site: Site, choice: int) -> ChcSystem:
    def dup(n: App) -> App:
        if not 0 <= choice < len(n.args):
            raise NotApplicable("DUP_AND", f"no operand {choice}")
        return App("and", n.args + (n.args[choice],), BOOL)
    return _edit(system, site, "and", 2, dup)


def mutate_break_and(system: ChcSystem, site: Site, choice: int) -> ChcSystem:
    """Split ``a1 & ... & an`` into ``a1 & ... & a_k & (a_k+1 & ... & an)``."""
    def brk(n: App) -> App:
        if not 1 <= choice <= len(n.args) - 2:
            raise NotApplicable("BREAK_AND", f"split point {choice} out of range")
        tail = App("and", n.args[choice:], BOOL)
        return App("and", n.args[:choice] + (tail,), BOOL)
    return _edit(system, site, "and", 3, brk)


def mutate_mix_bound_vars(clause: ChcClause, permutation) -> ChcClause:
    permutation = list(permutation)
    if len(clause.bound) < 2:
        raise NotApplicable("MIX_BOUND_VARS", "fewer than two bound variables")
    if sorted(permutation) != list(range(len(clause.bound))):
        raise ValueError(f"not a permutation of the prefix: {permutation}")
    bound = tuple(clause.bound[i] for i in permutation)
    return ChcClause(bound, clause.body, clause.head, clause.surface)


def _literal_value(t: Term):
    """Numeric value of an Int/Real literal (possibly negated), else None."""
    if isinstance(t, Const) and t.sort in (INT, REAL):
        return Decimal(t.value)
    if isinstance(t, App) and t.op == "-" and len(t.args) == 1:
        inner = t.args[0]
        if isinstance(inner, Const) and inner.sort in (INT, REAL):
            return -Decimal(inner.value)
    return None


def _literal(value: Decimal, sort) -> Term:
    if sort == INT:
        text = str(int(abs(value)))
    else:
        text = format(abs(value), "f")
        if "." not in text:
            text += ".0"
    c = Const(text, sort)
    return App("-", (c,), sort) if value < 0 else c


def is_ineq_site(t: Term) -> bool:
    if not (isinstance(t, App) and t.op in _CMP and len(t.args) == 2):
        return False
    a, b = t.args
    if isinstance(a, Var) and a.sort.is_arith and _literal_value(b) is not None:
        return True
    return isinstance(b, Var) and b.sort.is_arith and _literal_value(a) is not None


def ineq_sites(system: ChcSystem) -> list[Site]:
    return body_sites(system, is_ineq_site)


def weaken(site: Term) -> Term:
    """The implied, one-step-weaker version of a literal inequality."""
    if not is_ineq_site(site):
        raise NotApplicable("ADD_INEQ", "not a variable-vs-literal inequality")
    a, b = site.args
    literal_right = _literal_value(b) is not None and isinstance(a, Var)
    lit = b if literal_right else a
    value = _literal_value(lit)
    step = Decimal(1)
    # the literal moves away from the variable on the side that bounds it
    upper = (site.op in ("<", "<=")) == literal_right
    new_value = value + step if upper else value - step
    new_lit = _literal(new_value, lit.sort)
    args = (a, new_lit) if literal_right else (new_lit, b)
    return App(site.op, args, BOOL)


def mutate_add_ineq(site: Term) -> Term:
    return App("and", (site, weaken(site)), BOOL)


def mutate_add_ineq_at(system: ChcSystem, site: Site) -> ChcSystem:
    ci, path = site
    clause = system.clauses[ci]
    node = subterm(clause.body, tuple(path))
    body = replace_at(clause.body, tuple(path), mutate_add_ineq(node))
    return system.with_clause(ci, ChcClause(clause.bound, body, clause.head, clause.surface))
