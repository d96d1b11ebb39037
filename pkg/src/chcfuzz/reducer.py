"""Minimization of bug-triggering mutation chains and CHC systems.

``reduce_chain`` is chunked Delta Debugging over the mutation records.
``reduce_system`` first deletes whole clauses, then walks the remaining
clause bodies top-down deleting subtrees, keeping an edit only when the
bug still reproduces and the edited clause stays equivalent to the clause
it replaced.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

from .chc import ChcClause, ChcSystem
from .chc.system import ChcError, validate_clause
from .chc.terms import App, Quant, free_vars, replace_at, walk
from .mutations import engine
from .mutations.records import MutationChain
from .oracles import OracleSolver, check_clauses_equivalent

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2000

BugPredicate = Callable[[ChcSystem], bool]


class StaleFinding(Exception):
    """The bug does not reproduce on the unreduced input."""


@dataclass
class Budget:
    limit: int = DEFAULT_BUDGET
    used: int = 0
    history: list = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    def test(self, bug: BugPredicate, system: ChcSystem, what: str) -> bool:
        if self.exhausted:
            return False
        self.used += 1
        ok = bool(bug(system))
        self.history.append((what, ok))
        return ok


def _replay(seed, records):
    return engine.replay(seed, list(records))


def reduce_chain(seed: ChcSystem, chain: MutationChain, bug: BugPredicate,
                 replay=None, budget: Budget | None = None) -> MutationChain:
    """Chunked DD: start at ceil(len/2), halve after each pass, stop 1-minimal."""
    replay = replay or _replay
    budget = budget or Budget()
    records = list(chain.records)
    if not budget.test(bug, replay(seed, records), "full chain"):
        raise StaleFinding(f"bug does not reproduce on the full chain of {chain.seed_id}")
    chunk = max(1, math.ceil(len(records) / 2))
    while records:
        removed = False
        i = 0
        while i < len(records):
            candidate = records[:i] + records[i + chunk:]
            if budget.test(bug, replay(seed, candidate), f"drop records {i}..{i + chunk - 1}"):
                records = candidate
                removed = True
            else:
                i += chunk
        if budget.exhausted:
            log.warning("chain reduction stopped: budget of %d evaluations used", budget.limit)
            break
        if chunk == 1:
            if not removed:
                break
        else:
            chunk = math.ceil(chunk / 2)
    return MutationChain(chain.seed_id, tuple(records))


def _deletions(term):
    """Candidate (path, replacement) subtree deletions, top-down."""
    for p, t in walk(term):
        if isinstance(t, App) and t.op in ("and", "or") and len(t.args) >= 2:
            for j in range(len(t.args)):
                rest = t.args[:j] + t.args[j + 1:]
                yield p, rest[0] if len(rest) == 1 else App(t.op, rest, t.sort)
        elif isinstance(t, App) and t.op == "ite":
            yield p, t.args[1]
            yield p, t.args[2]
        elif isinstance(t, Quant):
            used = free_vars(t.body)
            keep = tuple(b for b in t.bound if b[0] in used)
            if len(keep) < len(t.bound):
                yield p, Quant(t.kind, keep, t.body) if keep else t.body


def _prune_prefix(clause: ChcClause) -> ChcClause | None:
    used = free_vars(clause.body) | free_vars(clause.head)
    keep = tuple(b for b in clause.bound if b[0] in used)
    if len(keep) == len(clause.bound):
        return None
    return ChcClause(keep, clause.body, clause.head, clause.surface)


def reduce_clauses(system: ChcSystem, bug: BugPredicate, budget: Budget | None = None) -> ChcSystem:
    """Phase 1: delete whole clauses while the bug reproduces."""
    budget = budget or Budget()
    changed = True
    while changed and not budget.exhausted:
        changed = False
        i = 0
        while i < len(system.clauses):
            clauses = system.clauses[:i] + system.clauses[i + 1:]
            candidate = system.with_clauses(clauses)
            if budget.test(bug, candidate, f"drop clause {i}"):
                system = candidate
                changed = True
            else:
                i += 1
    return system


def reduce_system(system: ChcSystem, bug: BugPredicate, original: ChcSystem | None = None,
                  oracle: OracleSolver | None = None, budget: Budget | None = None,
                  check_stale: bool = True) -> ChcSystem:
    """Phase 1 clause deletion, then equivalence-gated subtree deletion.

    ``original`` is accepted for symmetry with the finding record; the
    equivalence reference is each clause as it enters phase 2.
    """
    budget = budget or Budget()
    oracle = oracle or OracleSolver()
    if check_stale and not budget.test(bug, system, "input"):
        raise StaleFinding("bug does not reproduce on the input system")
    system = reduce_clauses(system, bug, budget)
    entry = system

    def acceptable(ci: int, clause: ChcClause) -> bool:
        try:
            validate_clause(clause, system, ci)
        except ChcError:
            return False
        if not check_clauses_equivalent(system, [(entry.clauses[ci], clause)], oracle):
            return False
        return budget.test(bug, system.with_clause(ci, clause), f"edit clause {ci}")

    changed = True
    while changed and not budget.exhausted:
        changed = False
        for ci in range(len(system.clauses)):
            progress = True
            while progress and not budget.exhausted:
                progress = False
                clause = system.clauses[ci]
                for path, repl in _deletions(clause.body):
                    body = replace_at(clause.body, path, repl)
                    cand = ChcClause(clause.bound, body, clause.head, clause.surface)
                    if acceptable(ci, cand):
                        system = system.with_clause(ci, cand)
                        progress = changed = True
                        break
                pruned = _prune_prefix(system.clauses[ci])
                if pruned is not None and acceptable(ci, pruned):
                    system = system.with_clause(ci, pruned)
                    progress = changed = True
    if budget.exhausted:
        log.warning("system reduction stopped: budget of %d evaluations used", budget.limit)
    return system
