"""Equivalent rewrites delegated to the solver's ``simplify`` tactic.

Each clause body is sent as one goal (bound variables declared as
constants), simplified, and the resulting goal read back as a conjunction.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from ..chc import ChcClause, ChcSystem
from ..chc.parser import parse_term
from ..chc.printer import print_decl, print_term
from ..chc.sexpr import Atom, read_all
from ..chc.system import ChcError, validate_clause
from ..chc.terms import Var, mk_and, quote_symbol
from ..runner import process
from .catalog import EMPTY_SIMPLIFY, simplify_params
from .records import NotApplicable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RewriteConfig:
    path: str = "z3"
    timeout: float = 10.0


def tactic(param: str) -> str:
    if param == EMPTY_SIMPLIFY:
        return "simplify"
    if param not in simplify_params():
        raise ValueError(f"unknown simplify parameter {param!r}")
    return f"(using-params simplify :{param} true)"


def rewrite_script(system: ChcSystem, param: str) -> str:
    lines = [f"(declare-sort {quote_symbol(n)} {a})" for n, a in system.sorts]
    lines += [print_decl(f) for f in system.functions]
    lines += [print_decl(p) for p in system.predicates]
    for i, c in enumerate(system.clauses):
        lines.append(f'(echo "@c{i}")')
        lines.append("(push 1)")
        for name, sort in c.bound:
            lines.append(f"(declare-fun {quote_symbol(name)} () {sort})")
        lines.append(f"(assert {print_term(c.body)})")
        lines.append(f"(apply {tactic(param)})")
        lines.append("(pop 1)")
    return "\n".join(lines) + "\n"


def _goal_formulas(expr) -> list:
    # (goals (goal f1 f2 ... :precision precise :depth 1))
    if not (isinstance(expr, list) and expr and expr[0] == "goals"):
        raise ValueError("expected a (goals ...) block")
    formulas = []
    for goal in expr[1:]:
        if not (isinstance(goal, list) and goal and goal[0] == "goal"):
            raise ValueError("malformed goal")
        for item in goal[1:]:
            if isinstance(item, Atom) and item.kind == "keyword":
                break
            formulas.append(item)
    if len(expr) != 2:
        raise ValueError("simplify produced more than one goal")
    return formulas


def mutate_rewrite(system: ChcSystem, param: str, config: RewriteConfig | None = None) -> ChcSystem:
    config = config or RewriteConfig()
    if not system.clauses:
        return system
    binary = process.resolve_binary(config.path)
    raw = process.run([binary, "-in"], rewrite_script(system, param),
                      timeout=config.timeout + len(system.clauses))
    if raw.timed_out or raw.returncode not in (0, None):
        raise NotApplicable("REWRITE", f"rewriting service failed (exit {raw.returncode})")
    chunks: dict[int, list[str]] = {}
    current = None
    for line in raw.stdout.splitlines():
        s = line.strip()
        if s.startswith("@c") and s[2:].isdigit():
            current = int(s[2:])
            chunks[current] = []
        elif current is not None:
            chunks[current].append(line)
    clauses = []
    for i, c in enumerate(system.clauses):
        text = "\n".join(chunks.get(i, []))
        try:
            if "(error" in text:
                raise ValueError(text.strip().splitlines()[0])
            exprs = read_all(text)
            if len(exprs) != 1:
                raise ValueError("expected exactly one goals block")
            env = {name: Var(name, sort) for name, sort in c.bound}
            parts = [parse_term(f, system, env) for f in _goal_formulas(exprs[0])]
            new = ChcClause(c.bound, mk_and(*parts), c.head, c.surface)
            validate_clause(new, system, i)
        except (ValueError, ChcError) as exc:
            log.info("rewrite %s unusable on clause %d: %s", param, i, exc)
            raise NotApplicable("REWRITE", f"unparseable rewriting output for clause {i}: {exc}")
        clauses.append(new)
    return system.with_clauses(clauses)
