"""Bug oracles: the verdict decision table, model validation and clause
equivalence, all backed by a separately configured oracle solver."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .chc import ChcClause, ChcSystem, Model, clause_matrix, substitute_model
from .chc.printer import print_decl, print_definition, print_term
from .chc.sexpr import read_all
from .chc.terms import App, BOOL, Quant, Sort, Term, quote_symbol
from .runner import process
from .runner.solve import SolverVerdict

log = logging.getLogger(__name__)

CHECK_MODEL = "check-model"
HANDLE_BUG = "handle-bug"
PASS = "pass"
LOG_INFO = "log-info"

SAT_BUG = "satisfiability-bug"
MODEL_BUG = "model-bug"
CRASH = "crash"
UNKNOWN_INFO = "unknown-info"


def judge(truth: str, verdict: str | SolverVerdict) -> str:
    """Decide what a mutant verdict means given the seed's ground truth."""
    outcome = verdict.outcome if isinstance(verdict, SolverVerdict) else verdict
    if truth not in ("sat", "unsat"):
        raise ValueError(f"ground truth must be sat or unsat, got {truth!r}")
    if outcome in ("unknown", "timeout"):
        return LOG_INFO
    if outcome == "crash":
        return HANDLE_BUG
    if truth == "sat":
        return CHECK_MODEL if outcome == "sat" else HANDLE_BUG
    return HANDLE_BUG if outcome == "sat" else PASS


@dataclass(frozen=True)
class OracleConfig:
    path: str = "z3"
    timeout: float = 10.0


@dataclass(frozen=True)
class Query:
    """Is ``formula`` satisfiable, with ``consts`` as free constants?"""

    consts: tuple[tuple[str, Sort], ...]
    formula: Term
    defs: tuple[str, ...] = ()


def _declarations(system: ChcSystem, with_predicates: bool = True) -> list[str]:
    lines = [f"(declare-sort {quote_symbol(n)} {a})" for n, a in system.sorts]
    lines += [print_decl(f) for f in system.functions]
    if with_predicates:
        lines += [print_decl(p) for p in system.predicates]
    return lines


class OracleSolver:
    """Batches satisfiability checks into one child process."""

    def __init__(self, config: OracleConfig | None = None):
        self.config = config or OracleConfig()
        self.calls = 0

    def check(self, system: ChcSystem, queries: Sequence[Query], with_predicates: bool = True,
              values: bool = False) -> list:
        """Return ``sat``/``unsat``/``unknown``/``error`` per query.

        With ``values=True`` each entry is a ``(verdict, {const: value})``
        pair, the values coming from ``get-value`` on sat answers.
        """
        if not queries:
            return []
        binary = process.resolve_binary(self.config.path)
        ms = max(1, int(self.config.timeout * 1000))
        lines = [f"(set-option :timeout {ms})"]
        lines += _declarations(system, with_predicates)
        for i, q in enumerate(queries):
            lines.append(f'(echo "@q{i}")')
            lines.append("(push 1)")
            lines += list(q.defs)
            for name, sort in q.consts:
                lines.append(f"(declare-fun {quote_symbol(name)} () {sort})")
            lines.append(f"(assert {print_term(q.formula)})")
            lines.append("(check-sat)")
            if values and q.consts:
                names = " ".join(quote_symbol(n) for n, _ in q.consts)
                lines.append(f"(get-value ({names}))")
            lines.append("(pop 1)")
        self.calls += 1
        raw = process.run([binary, "-in"], "\n".join(lines) + "\n",
                          timeout=self.config.timeout * len(queries) + 5.0)
        results = _split_results(raw.stdout, len(queries), values)
        if raw.timed_out:
            results = [r if r != "error" else "unknown" for r in results]
        return results


def _split_results(stdout: str, n: int, values: bool) -> list:
    segments: dict[int, list[str]] = {}
    current = None
    for line in stdout.splitlines():
        s = line.strip()
        if s.startswith("@q") and s[2:].isdigit():
            current = int(s[2:])
            segments[current] = []
        elif current is not None:
            segments[current].append(s)
    out = []
    for i in range(n):
        seg = segments.get(i, [])
        verdict, rest = "unknown", []
        for j, ln in enumerate(seg):
            if ln.startswith("(error"):
                verdict = "error"
                break
            if ln in ("sat", "unsat", "unknown"):
                verdict, rest = ln, seg[j + 1:]
                break
        if values:
            out.append((verdict, _parse_values("\n".join(rest)) if verdict == "sat" else {}))
        else:
            out.append(verdict)
    return out


def _parse_values(text: str) -> dict[str, str]:
    try:
        exprs = read_all(text)
    except ValueError:
        return {}
    vals = {}
    for e in exprs:
        if isinstance(e, list):
            for pair in e:
                if isinstance(pair, list) and len(pair) == 2:
                    vals[str(pair[0])] = _show(pair[1])
    return vals


def _show(e) -> str:
    if isinstance(e, list):
        return "(" + " ".join(_show(x) for x in e) + ")"
    return str(e)


@dataclass(frozen=True)
class ModelCheck:
    ok: bool
    clause: int | None = None
    witness: dict = field(default_factory=dict)
    inconclusive: tuple[int, ...] = ()

    @property
    def is_bug(self) -> bool:
        return not self.ok


def _aux_defs(model: Model) -> tuple[str, ...]:
    return tuple(print_definition(n, d) for n, d in model.aux.items())


def _open(formula: Term) -> tuple[tuple, Term]:
    """Split a leading forall prefix off a closed formula."""
    if isinstance(formula, Quant) and formula.kind == "forall":
        return formula.bound, formula.body
    return (), formula


def validate_model(system: ChcSystem, model: Model, oracle: OracleSolver | None = None) -> ModelCheck:
    """Check every clause under the model; a satisfiable negation is a bug."""
    oracle = oracle or OracleSolver()
    closed = substitute_model(system, model)
    defs = _aux_defs(model)
    queries = []
    for f in closed:
        consts, matrix = _open(f)
        queries.append(Query(consts, App("not", (matrix,), BOOL), defs))
    results = oracle.check(system, queries, with_predicates=False)
    inconclusive = []
    for i, r in enumerate(results):
        if r == "sat":
            (_, witness), = oracle.check(system, [queries[i]], with_predicates=False, values=True)
            return ModelCheck(False, i, witness)
        if r != "unsat":
            log.info("model check inconclusive on clause %d (%s)", i, r)
            inconclusive.append(i)
    return ModelCheck(True, inconclusive=tuple(inconclusive))


def equivalence_query(f: ChcClause, r: ChcClause) -> Query | None:
    """Query whose unsatisfiability shows ``f`` and ``r`` equivalent.

    Both matrices are compared over the union of their bound variables taken
    as free constants; matching matrices make the quantified clauses
    equivalent.  Returns None if a name is bound at different sorts.
    """
    consts = dict(f.bound)
    for name, sort in r.bound:
        if consts.setdefault(name, sort) != sort:
            return None
    formula = App("not", (App("=", (clause_matrix(f), clause_matrix(r)), BOOL),), BOOL)
    return Query(tuple(consts.items()), formula)


def check_clauses_equivalent(system: ChcSystem, pairs: Sequence[tuple[ChcClause, ChcClause]],
                             oracle: OracleSolver | None = None) -> bool:
    oracle = oracle or OracleSolver()
    queries = []
    for f, r in pairs:
        if f == r:
            continue
        q = equivalence_query(f, r)
        if q is None:
            return False
        queries.append(q)
    return all(res == "unsat" for res in oracle.check(system, queries))


def check_equivalence(original: ChcSystem, reduced: ChcSystem,
                      oracle: OracleSolver | None = None) -> bool:
    """True iff every aligned clause pair is equivalent per the oracle.

    Unknown or failed checks count as not equivalent.
    """
    if len(original.clauses) != len(reduced.clauses):
        raise ValueError("equivalence needs aligned clause lists of equal length")
    return check_clauses_equivalent(original, list(zip(original.clauses, reduced.clauses)), oracle)


def is_unsat(system: ChcSystem, consts: tuple[tuple[str, Sort], ...], formula: Term,
             oracle: OracleSolver | None = None) -> bool:
    oracle = oracle or OracleSolver()
    return oracle.check(system, [Query(consts, formula)])[0] == "unsat"


@dataclass
class Finding:
    kind: str
    seed_id: str
    chain: object
    mutant_verdict: SolverVerdict
    truth: str
    evidence: dict = field(default_factory=dict)
    mutant: ChcSystem | None = None
    seed: ChcSystem | None = None
