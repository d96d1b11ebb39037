"""SMT-LIB2 printing for terms and CHC systems."""
from __future__ import annotations

from .system import ChcClause, ChcSystem, Definition, FunDecl, OptionValue
from .terms import FALSE, App, Const, PredApp, Quant, Term, Var, quote_symbol


def print_term(term: Term) -> str:
    out: list[str] = []
    _emit(term, out)
    return "".join(out)


def _emit(term: Term, out: list[str]) -> None:
    # explicit stack: deep BREAK_AND chains must not hit the recursion limit
    stack: list = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, str):
            out.append(t)
        elif isinstance(t, Var):
            out.append(quote_symbol(t.name))
        elif isinstance(t, Const):
            out.append(t.value)
        elif isinstance(t, (App, PredApp)):
            head = t.op if isinstance(t, App) else quote_symbol(t.pred)
            if isinstance(t, App) and not head.startswith("("):
                head = quote_symbol(head)
            if not t.args:
                out.append(head)
                continue
            out.append("(" + head)
            stack.append(")")
            for a in reversed(t.args):
                stack.append(a)
                stack.append(" ")
        elif isinstance(t, Quant):
            binders = " ".join(f"({quote_symbol(n)} {s})" for n, s in t.bound)
            out.append(f"({t.kind} ({binders}) ")
            stack.append(")")
            stack.append(t.body)
        else:
            raise TypeError(f"not a term: {t!r}")


def print_clause(clause: ChcClause) -> str:
    body, head = print_term(clause.body), print_term(clause.head)
    if clause.surface == "not-exists":
        matrix = f"(not (exists ({_binders(clause)}) {body}))"
        return matrix
    if clause.surface == "or":
        matrix = f"(not {body})" if clause.head == FALSE else f"(or (not {body}) {head})"
    elif clause.surface == "head":
        matrix = head
    else:
        matrix = f"(=> {body} {head})"
    if not clause.bound:
        return matrix
    return f"(forall ({_binders(clause)}) {matrix})"


def _binders(clause: ChcClause) -> str:
    return " ".join(f"({quote_symbol(n)} {s})" for n, s in clause.bound)


def print_option_value(value: OptionValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def print_decl(decl: FunDecl) -> str:
    dom = " ".join(str(s) for s in decl.domain)
    return f"(declare-fun {quote_symbol(decl.name)} ({dom}) {decl.range})"


def print_definition(name: str, defn: Definition) -> str:
    params = " ".join(f"({quote_symbol(n)} {s})" for n, s in defn.params)
    return f"(define-fun {quote_symbol(name)} ({params}) {defn.range} {print_term(defn.body)})"


def print_preamble(system: ChcSystem, logic: bool = True) -> list[str]:
    lines = []
    if logic:
        lines.append(f"(set-logic {system.logic})")
    for name, value in system.options:
        lines.append(f"(set-option :{name} {print_option_value(value)})")
    for name, arity in system.sorts:
        lines.append(f"(declare-sort {quote_symbol(name)} {arity})")
    for f in system.functions:
        lines.append(print_decl(f))
    for p in system.predicates:
        lines.append(print_decl(p))
    return lines


def print_script(system: ChcSystem) -> str:
    """Render a complete, re-parseable script ending in check-sat/get-model."""
    lines = print_preamble(system)
    for c in system.clauses:
        lines.append(f"(assert {print_clause(c)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"
