"""SMT-LIB2 front end for the HORN fragment."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .sexpr import Atom, SmtSyntaxError, pos_of, read_all
from .system import (
    ChcClause, ChcError, ChcSystem, Definition, FunDecl, Model, OptionValue, validate_clause,
)
from .terms import (
    BOOL, FALSE, INT, REAL, TRUE, App, Const, PredApp, Quant, Sort, Term, Var,
    array, bitvec, mk_not, substitute, uninterpreted,
)

log = logging.getLogger(__name__)


class SortError(ChcError):
    pass


_IGNORED_COMMANDS = {"check-sat", "get-model", "exit", "set-info", "get-info",
                     "echo", "get-proof", "get-value", "get-assertions"}
_REJECTED_COMMANDS = {"declare-datatypes", "declare-datatype", "define-fun-rec",
                      "define-funs-rec", "push", "pop", "declare-rel", "rule", "query",
                      "declare-var", "check-sat-assuming", "define-sort"}

_BOOL_NARY = {"and", "or", "xor"}
_ARITH_NARY = {"+", "*", "-"}
_ARITH_CMP = {"<", "<=", ">", ">="}
_BV_SAME = {"bvadd", "bvsub", "bvmul", "bvudiv", "bvurem", "bvsdiv", "bvsrem", "bvsmod",
            "bvand", "bvor", "bvxor", "bvnand", "bvnor", "bvxnor", "bvshl", "bvlshr",
            "bvashr"}
_BV_UNARY = {"bvnot", "bvneg"}
_BV_CMP = {"bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge"}


def _err(msg: str, expr=None) -> SortError:
    line, col = pos_of(expr)
    if line:
        msg = f"{line}:{col}: {msg}"
    return SortError(msg)


def _arith_join(sorts, expr) -> Sort:
    for s in sorts:
        if not s.is_arith:
            raise _err(f"arithmetic operand of sort {s}", expr)
    return REAL if any(s == REAL for s in sorts) else INT


def app_sort(op: str, args: tuple[Term, ...], expr=None, indices: tuple[int, ...] = ()) -> Sort:
    """Result sort of a theory operator; raises SortError on ill-sorted use."""
    sorts = [a.sort for a in args]
    n = len(args)
    if op == "not":
        if n != 1 or sorts[0] != BOOL:
            raise _err("'not' takes one Bool argument", expr)
        return BOOL
    if op in _BOOL_NARY or op == "=>":
        if n < 1 or any(s != BOOL for s in sorts):
            raise _err(f"'{op}' takes Bool arguments", expr)
        return BOOL
    if op in ("=", "distinct"):
        if n < 2:
            raise _err(f"'{op}' needs at least two arguments", expr)
        first = sorts[0]
        for s in sorts[1:]:
            if s != first and not (s.is_arith and first.is_arith):
                raise _err(f"'{op}' over mismatched sorts {first} and {s}", expr)
        return BOOL
    if op == "ite":
        if n != 3 or sorts[0] != BOOL:
            raise _err("'ite' takes a Bool condition and two branches", expr)
        if sorts[1] != sorts[2]:
            if sorts[1].is_arith and sorts[2].is_arith:
                return REAL
            raise _err("'ite' branches differ in sort", expr)
        return sorts[1]
    if op in _ARITH_NARY:
        if n < 1:
            raise _err(f"'{op}' needs arguments", expr)
        return _arith_join(sorts, expr)
    if op == "/":
        _arith_join(sorts, expr)
        return REAL
    if op in ("div", "mod"):
        if n != 2 or any(s != INT for s in sorts):
            raise _err(f"'{op}' takes two Int arguments", expr)
        return INT
    if op == "abs":
        return _arith_join(sorts, expr)
    if op in _ARITH_CMP:
        if n < 2:
            raise _err(f"'{op}' needs at least two arguments", expr)
        _arith_join(sorts, expr)
        return BOOL
    if op == "to_real":
        _arith_join(sorts, expr)
        return REAL
    if op == "to_int":
        _arith_join(sorts, expr)
        return INT
    if op == "is_int":
        _arith_join(sorts, expr)
        return BOOL
    if op == "select":
        if n != 2 or sorts[0].kind != "Array":
            raise _err("'select' takes an array and an index", expr)
        return sorts[0].args[1]
    if op == "store":
        if n != 3 or sorts[0].kind != "Array":
            raise _err("'store' takes an array, an index and a value", expr)
        return sorts[0]
    if op in _BV_SAME or op in _BV_UNARY:
        if n < 1 or sorts[0].kind != "BitVec" or any(s != sorts[0] for s in sorts):
            raise _err(f"'{op}' over mismatched bit-vectors", expr)
        return sorts[0]
    if op in _BV_CMP:
        if n != 2 or sorts[0].kind != "BitVec" or sorts[0] != sorts[1]:
            raise _err(f"'{op}' over mismatched bit-vectors", expr)
        return BOOL
    if op == "bvcomp":
        return bitvec(1)
    if op == "concat":
        if any(s.kind != "BitVec" for s in sorts):
            raise _err("'concat' takes bit-vectors", expr)
        return bitvec(sum(s.width for s in sorts))
    if op == "bv2nat":
        return INT
    if op == "extract":
        hi, lo = indices
        if sorts[0].kind != "BitVec" or not (0 <= lo <= hi < sorts[0].width):
            raise _err("bad extract indices", expr)
        return bitvec(hi - lo + 1)
    if op in ("zero_extend", "sign_extend"):
        return bitvec(sorts[0].width + indices[0])
    if op == "repeat":
        return bitvec(sorts[0].width * indices[0])
    if op in ("rotate_left", "rotate_right"):
        return sorts[0]
    if op == "int2bv":
        return bitvec(indices[0])
    raise _err(f"unsupported symbol '{op}' (outside Bool/LIA/LRA/arrays/bit-vectors)", expr)


@dataclass
class _Scope:
    """Symbol environment for term parsing."""

    system_preds: dict
    functions: dict
    macros: dict = field(default_factory=dict)
    frames: list = field(default_factory=list)
    used: set = field(default_factory=set)
    sorts: dict = field(default_factory=dict)

    def lookup(self, name: str):
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        return None

    def fresh(self, name: str) -> str:
        if name not in self.used and name not in self.functions and name not in self.system_preds:
            return name
        k = 1
        while True:
            cand = f"{name}_{k}"
            if cand not in self.used and cand not in self.functions and cand not in self.system_preds:
                return cand
            k += 1


def parse_sort(expr, sorts: dict | None = None) -> Sort:
    sorts = sorts or {}
    if isinstance(expr, Atom):
        if expr == "Bool":
            return BOOL
        if expr == "Int":
            return INT
        if expr == "Real":
            return REAL
        if expr in sorts:
            return uninterpreted(str(expr))
        raise _err(f"unknown sort '{expr}'", expr)
    if len(expr) == 3 and expr[0] == "_" and expr[1] == "BitVec":
        return bitvec(int(expr[2]))
    if len(expr) == 3 and expr[0] == "Array":
        return array(parse_sort(expr[1], sorts), parse_sort(expr[2], sorts))
    raise _err(f"unsupported sort {_show(expr)}", expr)


def _show(expr) -> str:
    if isinstance(expr, list):
        return "(" + " ".join(_show(e) for e in expr) + ")"
    return str(expr)


class TermParser:
    def __init__(self, scope: _Scope):
        self.scope = scope

    def parse(self, expr) -> Term:
        if isinstance(expr, Atom):
            return self._atom(expr)
        if not expr:
            raise _err("empty application", expr)
        head = expr[0]
        if isinstance(head, Atom) and not head.quoted:
            if head in ("forall", "exists"):
                return self._quant(expr)
            if head == "let":
                return self._let(expr)
            if head == "!":
                return self.parse(expr[1])
            if head == "_" and len(expr) == 3 and str(expr[1]).startswith("bv"):
                return Const(f"(_ {expr[1]} {expr[2]})", bitvec(int(expr[2])))
        args = tuple(self.parse(e) for e in expr[1:])
        if isinstance(head, list):
            return self._indexed(head, args, expr)
        name = str(head)
        if name in self.scope.system_preds and self.scope.lookup(name) is None:
            decl = self.scope.system_preds[name]
            if len(args) != len(decl.domain):
                raise _err(f"predicate {name} expects {len(decl.domain)} arguments", expr)
            for a, s in zip(args, decl.domain):
                if a.sort != s and not (a.sort.is_arith and s.is_arith):
                    raise _err(f"argument of sort {a.sort} passed to {name} where {s} expected", expr)
            return PredApp(name, args)
        if name in self.scope.macros:
            params, body = self.scope.macros[name]
            return substitute(body, {p: a for (p, _), a in zip(params, args)})
        if name in self.scope.functions:
            decl = self.scope.functions[name]
            if len(args) != len(decl.domain):
                raise _err(f"function {name} expects {len(decl.domain)} arguments", expr)
            return App(name, args, decl.range)
        return App(name, args, app_sort(name, args, expr))

    def _atom(self, a: Atom) -> Term:
        if a.kind == "numeral":
            return Const(str(a), INT)
        if a.kind == "decimal":
            return Const(str(a), REAL)
        if a.kind == "binary":
            return Const(str(a), bitvec(len(a) - 2))
        if a.kind == "hex":
            return Const(str(a), bitvec(4 * (len(a) - 2)))
        if a.kind != "symbol":
            raise _err(f"unexpected token '{a}'", a)
        bound = self.scope.lookup(str(a))
        if bound is not None:
            return bound
        if not a.quoted:
            if a == "true":
                return TRUE
            if a == "false":
                return FALSE
        name = str(a)
        if name in self.scope.system_preds:
            decl = self.scope.system_preds[name]
            if decl.domain:
                raise _err(f"predicate {name} used without arguments", a)
            return PredApp(name, ())
        if name in self.scope.macros:
            return self.scope.macros[name][1]
        if name in self.scope.functions:
            decl = self.scope.functions[name]
            if decl.domain:
                raise _err(f"function {name} used without arguments", a)
            return App(name, (), decl.range)
        raise _err(f"unknown symbol '{name}'", a)

    def _quant(self, expr) -> Term:
        if len(expr) != 3 or not isinstance(expr[1], list):
            raise _err("malformed quantifier", expr)
        bound = []
        frame = {}
        for b in expr[1]:
            if not isinstance(b, list) or len(b) != 2:
                raise _err("malformed binder", b)
            orig = str(b[0])
            sort = parse_sort(b[1], self.scope.sorts)
            if orig in frame:
                raise _err(f"duplicate bound variable '{orig}'", b)
            name = self.scope.fresh(orig)
            self.scope.used.add(name)
            frame[orig] = Var(name, sort)
            bound.append((name, sort))
        self.scope.frames.append(frame)
        try:
            body = self.parse(expr[2])
        finally:
            self.scope.frames.pop()
        if body.sort != BOOL:
            raise _err("quantifier body is not Bool", expr)
        return Quant(str(expr[0]), tuple(bound), body)

    def _let(self, expr) -> Term:
        if len(expr) != 3 or not isinstance(expr[1], list):
            raise _err("malformed let", expr)
        frame = {}
        for b in expr[1]:
            frame[str(b[0])] = self.parse(b[1])
        self.scope.frames.append(frame)
        try:
            return self.parse(expr[2])
        finally:
            self.scope.frames.pop()

    def _indexed(self, head: list, args: tuple[Term, ...], expr) -> Term:
        if head and head[0] == "_" and len(head) >= 3:
            indices = tuple(int(i) for i in head[2:])
            op = str(head[1])
            sort = app_sort(op, args, expr, indices)
            return App("(_ " + " ".join(str(h) for h in head[1:]) + ")", args, sort)
        if len(head) == 3 and head[0] == "as" and head[1] == "const":
            sort = parse_sort(head[2], self.scope.sorts)
            if sort.kind != "Array" or len(args) != 1:
                raise _err("malformed constant array", expr)
            return App(f"(as const {sort})", args, sort)
        raise _err(f"unsupported operator {_show(head)}", expr)


def _strip_forall(term: Term) -> tuple[tuple, Term]:
    bound: tuple = ()
    while isinstance(term, Quant) and term.kind == "forall":
        bound += term.bound
        term = term.body
    return bound, term


def to_clause(term: Term, index: int | None = None) -> ChcClause:
    """Normalize an asserted formula into implication form."""
    if isinstance(term, App) and term.op == "not" and isinstance(term.args[0], Quant) \
            and term.args[0].kind == "exists":
        q = term.args[0]
        return ChcClause(q.bound, q.body, FALSE, "not-exists")
    bound, matrix = _strip_forall(term)
    if isinstance(matrix, App) and matrix.op == "=>":
        premises = matrix.args[:-1]
        body = premises[0] if len(premises) == 1 else App("and", premises, BOOL)
        return ChcClause(bound, body, matrix.args[-1], "implies")
    if isinstance(matrix, App) and matrix.op in ("or", "not"):
        disjuncts = matrix.args if matrix.op == "or" else (matrix,)
        heads = [d for d in disjuncts if isinstance(d, PredApp)]
        if len(heads) > 1:
            raise ChcError("disjunction with more than one positive predicate", index)
        parts = []
        for d in disjuncts:
            if isinstance(d, PredApp):
                continue
            if isinstance(d, App) and d.op == "not":
                parts.append(d.args[0])
            else:
                parts.append(mk_not(d))
        body = parts[0] if len(parts) == 1 else (App("and", tuple(parts), BOOL) if parts else TRUE)
        return ChcClause(bound, body, heads[0] if heads else FALSE, "or")
    if isinstance(matrix, PredApp) or matrix == FALSE:
        return ChcClause(bound, TRUE, matrix, "head")
    raise ChcError("assertion is not a Horn clause", index)


def _option_value(expr) -> OptionValue:
    if isinstance(expr, Atom) and expr.kind == "symbol" and expr in ("true", "false"):
        return expr == "true"
    return _show(expr)


def parse_script(text: str) -> ChcSystem:
    """Parse an SMT-LIB2 HORN script into a :class:`ChcSystem`."""
    commands = read_all(text)
    logic = "HORN"
    options: list = []
    sorts: dict[str, int] = {}
    preds: dict[str, FunDecl] = {}
    funcs: dict[str, FunDecl] = {}
    macros: dict = {}
    clauses: list[ChcClause] = []
    n_assert = 0
    for cmd in commands:
        if not isinstance(cmd, list) or not cmd or not isinstance(cmd[0], Atom):
            raise SmtSyntaxError("expected a command", *pos_of(cmd))
        name = str(cmd[0])
        if name == "set-logic":
            logic = str(cmd[1])
            if logic != "HORN":
                raise ChcError(f"unsupported logic {logic}; expected HORN")
        elif name == "set-option":
            options.append((str(cmd[1]).lstrip(":"), _option_value(cmd[2]) if len(cmd) > 2 else True))
        elif name == "declare-sort":
            arity = int(cmd[2]) if len(cmd) > 2 else 0
            if arity:
                raise ChcError(f"parametric sort {cmd[1]} is not supported")
            sorts[str(cmd[1])] = arity
        elif name in ("declare-fun", "declare-const"):
            sym = str(cmd[1])
            if name == "declare-const":
                domain, rng = (), parse_sort(cmd[2], sorts)
            else:
                domain = tuple(parse_sort(s, sorts) for s in cmd[2])
                rng = parse_sort(cmd[3], sorts)
            decl = FunDecl(sym, domain, rng)
            if rng == BOOL and name == "declare-fun":
                preds[sym] = decl
            else:
                funcs[sym] = decl
        elif name == "define-fun":
            scope = _Scope(preds, funcs, macros, sorts=sorts)
            params = tuple((str(p[0]), parse_sort(p[1], sorts)) for p in cmd[2])
            scope.frames.append({p: Var(p, s) for p, s in params})
            body = TermParser(scope).parse(cmd[4])
            macros[str(cmd[1])] = (params, body)
        elif name == "assert":
            scope = _Scope(preds, funcs, macros, sorts=sorts)
            term = TermParser(scope).parse(cmd[1])
            if term.sort != BOOL:
                raise ChcError("asserted term is not Bool", n_assert)
            clauses.append(to_clause(term, n_assert))
            n_assert += 1
        elif name in _REJECTED_COMMANDS:
            raise ChcError(f"unsupported command '{name}'")
        elif name in _IGNORED_COMMANDS:
            continue
        else:
            log.debug("dropping command %s", name)
    system = ChcSystem(
        predicates=tuple(preds.values()),
        functions=tuple(funcs.values()),
        clauses=tuple(clauses),
        logic=logic,
        options=tuple(options),
        sorts=tuple(sorts.items()),
    )
    for i, c in enumerate(system.clauses):
        validate_clause(c, system, i)
    return system


def make_scope(system: ChcSystem, env: dict[str, Term] | None = None,
               extra_funcs: dict[str, FunDecl] | None = None) -> _Scope:
    funcs = dict(system.fun_table)
    funcs.update(extra_funcs or {})
    scope = _Scope(system.pred_table, funcs, sorts=dict(system.sorts))
    if env:
        scope.frames.append(dict(env))
        scope.used.update(v.name for v in env.values() if isinstance(v, Var))
    return scope


def parse_term(text_or_expr, system: ChcSystem, env: dict[str, Term] | None = None,
               extra_funcs: dict[str, FunDecl] | None = None) -> Term:
    """Parse one term in the context of ``system``'s declarations."""
    expr = read_all(text_or_expr)[0] if isinstance(text_or_expr, str) else text_or_expr
    return TermParser(make_scope(system, env, extra_funcs)).parse(expr)


def parse_model(text: str, system: ChcSystem) -> Model:
    """Parse a ``get-model`` response.

    Accepts both ``((define-fun ...) ...)`` and ``(model (define-fun ...))``.
    """
    exprs = read_all(text)
    defs = []

    def collect(e):
        if isinstance(e, list) and e and e[0] == "define-fun":
            defs.append(e)
        elif isinstance(e, list):
            for sub in e:
                if isinstance(sub, list):
                    collect(sub)

    for e in exprs:
        collect(e)
    headers: dict[str, FunDecl] = {}
    for d in defs:
        name = str(d[1])
        params = tuple((str(p[0]), parse_sort(p[1], dict(system.sorts))) for p in d[2])
        headers[name] = FunDecl(name, tuple(s for _, s in params), parse_sort(d[3], dict(system.sorts)))
    aux_decls = {n: f for n, f in headers.items() if n not in system.pred_table}
    definitions: dict = {}
    aux: dict = {}
    for d in defs:
        name = str(d[1])
        params = tuple((str(p[0]), parse_sort(p[1], dict(system.sorts))) for p in d[2])
        env = {p: Var(p, s) for p, s in params}
        # inside a model, predicates are interpreted: parse bodies with
        # predicate symbols demoted to ordinary functions
        scope = _Scope({}, {**system.fun_table, **aux_decls,
                            **{p.name: p for p in system.predicates}}, sorts=dict(system.sorts))
        scope.frames.append(env)
        body = TermParser(scope).parse(d[4])
        defn = Definition(params, body, headers[name].range)
        if name in system.pred_table:
            definitions[name] = defn
        else:
            aux[name] = defn
    return Model(definitions, aux)
