"""Seed groups, transition statistics, heuristics and mutation weights.

All state mutation happens in the single scheduler context; workers only
hand back (verdict, trace) pairs which are recorded serially.
"""
from __future__ import annotations

import logging
import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .chc import ChcSystem
from .mutations.catalog import TYPE_NAMES, identifiers
from .mutations.records import MutationChain
from .runner.trace import TraceSummary

log = logging.getLogger(__name__)

BUG_LIMIT = 3
UNKNOWN_LIMIT = 10
RUN_CAP = 100
STAGNATION_FACTOR = 5
ROLLBACK_TIMEOUTS = 3
ROLLBACK_FACTOR = 3          # rollback after ROLLBACK_FACTOR * 5n runs without a new trace
WEIGHT_PERIOD = 1000
INITIAL_WEIGHT = 0.1
DECAY = 0.62                 # w = DECAY * w' + (1 - DECAY) * p

HEURISTICS = ("default", "rare-transitions", "complex", "simple")


@dataclass
class SeedGroup:
    seed_id: str
    seed: ChcSystem
    truth: str
    index: int = 0
    chain: MutationChain = None
    current: ChcSystem = None
    consecutive_runs: int = 0
    stagnant_runs: int = 0
    unknown_count: int = 0
    bug_count: int = 0
    timeout_streak: int = 0
    runs_without_new: int = 0
    total_runs: int = 0
    rollbacks: int = 0
    retired: bool = False
    transition_counts: Counter = field(default_factory=Counter)

    def __post_init__(self):
        if self.chain is None:
            self.chain = MutationChain(self.seed_id)
        if self.current is None:
            self.current = self.seed

    @property
    def clause_count(self) -> int:
        return len(self.current.clauses)

    @property
    def stagnation_limit(self) -> int:
        return STAGNATION_FACTOR * max(1, self.clause_count)

    def rollback(self):
        self.chain = MutationChain(self.seed_id)
        self.current = self.seed
        self.timeout_streak = 0
        self.runs_without_new = 0
        self.rollbacks += 1

    def leave(self):
        """Reset the per-visit counters when the scheduler moves elsewhere."""
        self.consecutive_runs = 0
        self.stagnant_runs = 0
        self.unknown_count = 0

    def counters(self) -> dict:
        return {
            "runs": self.total_runs, "chain_length": len(self.chain),
            "clauses": self.clause_count, "consecutive_runs": self.consecutive_runs,
            "stagnant_runs": self.stagnant_runs, "unknown_count": self.unknown_count,
            "bug_count": self.bug_count, "rollbacks": self.rollbacks, "retired": self.retired,
        }


class TransitionStats:
    """Global sparse transition counts plus the set of traces seen so far."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.row_sums: Counter = Counter()
        self.traces: set[int] = set()

    @property
    def unique_traces(self) -> int:
        return len(self.traces)

    def add(self, trace: TraceSummary) -> bool:
        """Merge one trace; True iff its hash was never seen before."""
        for (i, j), c in trace.transitions.items():
            self.counts[(i, j)] += c
            self.row_sums[i] += c
        new = trace.trace_hash not in self.traces
        self.traces.add(trace.trace_hash)
        return new

    def probability(self, i, j) -> float:
        total = self.row_sums.get(i, 0)
        return self.counts.get((i, j), 0) / total if total else 0.0

    def weight(self, i, j) -> float:
        p = self.probability(i, j)
        return 1.0 / p if p > 0 else 0.0


def priority(stats: TransitionStats, group: SeedGroup) -> float:
    """k_m = sum_ij w_ij * t^m_ij with w_ij = 1/p_ij; +inf before any run."""
    if not group.transition_counts:
        return math.inf
    return math.fsum(stats.weight(i, j) * t for (i, j), t in group.transition_counts.items())


def complexity(group: SeedGroup) -> tuple[int, int]:
    """(non-linear?, predicate count); larger means more complex."""
    system = group.current
    return (0 if system.is_linear else 1, len(system.predicates))


def _rank(heuristic: str, group: SeedGroup, stats: TransitionStats, rotation: dict):
    # smaller sorts first
    if heuristic == "default":
        return rotation[group.seed_id]
    if heuristic == "rare-transitions":
        return -priority(stats, group)
    if heuristic == "complex":
        nonlin, preds = complexity(group)
        return (-nonlin, -preds)
    if heuristic == "simple":
        return complexity(group)
    raise ValueError(f"unknown heuristic {heuristic!r}")


def parse_heuristic(text) -> tuple[str, ...]:
    """``complex`` or ``complex+rare-transitions`` (partition by the first, order by the second)."""
    parts = tuple(text) if isinstance(text, (tuple, list)) else tuple(text.split("+"))
    if not 1 <= len(parts) <= 2 or any(p not in HEURISTICS for p in parts):
        raise ValueError(f"bad heuristic {text!r}; choose from {HEURISTICS} or a pair joined by '+'")
    return parts


def order_groups(heuristic, groups, stats: TransitionStats, after: str | None = None) -> list[SeedGroup]:
    """Eligible groups, best first. Ties keep input order."""
    parts = parse_heuristic(heuristic)
    eligible = [g for g in groups if not g.retired]
    n = len(groups)
    start = 0
    if after is not None:
        for g in groups:
            if g.seed_id == after:
                start = g.index + 1
    rotation = {g.seed_id: (g.index - start) % max(n, 1) for g in groups}
    return sorted(eligible, key=lambda g: tuple(_rank(h, g, stats, rotation) for h in parts) + (g.index,))


def select_group(heuristic, groups, stats: TransitionStats, after: str | None = None,
                 exclude=()) -> str | None:
    """Seed id of the next group, or None when every group is retired."""
    ordered = order_groups(heuristic, groups, stats, after)
    preferred = [g for g in ordered if g.seed_id not in exclude]
    pick = preferred or ordered
    return pick[0].seed_id if pick else None


class MutationWeights:
    def __init__(self, ids=None, initial: float = INITIAL_WEIGHT):
        if ids is None:
            ids = [i for t in TYPE_NAMES for i in identifiers(t)]
        self.table: dict[str, list] = {i: [initial, 0, 0] for i in ids}

    def weight(self, ident: str) -> float:
        return self.table[ident][0]

    def record(self, ident: str, new_trace: bool):
        entry = self.table[ident]
        entry[1] += 1
        if new_trace:
            entry[2] += 1

    def update(self):
        for entry in self.table.values():
            w, a, h = entry
            if a >= 1:
                entry[0] = DECAY * w + (1 - DECAY) * (h / a)

    def snapshot(self) -> dict:
        return {i: {"weight": w, "applications": a, "hits": h} for i, (w, a, h) in self.table.items()}


def update_weights(weights: MutationWeights) -> MutationWeights:
    weights.update()
    return weights


def choose_mutation(weights: MutationWeights, enabled_types, rng: random.Random,
                    equiprobable: bool = False, available=None) -> str:
    """Uniform over enabled types, then weighted (or uniform) within the type.

    ``available`` optionally filters identifiers (e.g. parameters already
    toggled on the current system); a type left empty is skipped.
    """
    types = [t for t in TYPE_NAMES if t in set(enabled_types)]
    if not types:
        raise ValueError("no mutation type enabled")
    while types:
        t = rng.choice(types)
        ids = [i for i in identifiers(t) if available is None or available(i)]
        if not ids:
            types.remove(t)
            continue
        if equiprobable:
            return rng.choice(ids)
        ws = [weights.weight(i) for i in ids]
        if sum(ws) <= 0:
            return rng.choice(ids)
        return rng.choices(ids, weights=ws, k=1)[0]
    raise LookupError("no applicable mutation identifier in any enabled type")


KEEP = "keep"
SWITCH = "switch"
ROLLBACK = "rollback"


def should_switch(group: SeedGroup) -> tuple[str, str | None]:
    if group.bug_count >= BUG_LIMIT:
        return SWITCH, "bug-limit"
    if group.timeout_streak >= ROLLBACK_TIMEOUTS:
        return ROLLBACK, "timeouts"
    if group.runs_without_new >= ROLLBACK_FACTOR * group.stagnation_limit:
        return ROLLBACK, "no-new-traces"
    if group.unknown_count >= UNKNOWN_LIMIT:
        return SWITCH, "unknown-limit"
    if group.stagnant_runs >= group.stagnation_limit:
        return SWITCH, "stagnation"
    if group.consecutive_runs >= RUN_CAP:
        return SWITCH, "cap"
    return KEEP, None


def record_run(group: SeedGroup, stats: TransitionStats, weights: MutationWeights | None,
               outcome: str, trace: TraceSummary, ident: str | None, bug: bool = False) -> bool:
    """Fold one run into the group and global statistics; returns trace novelty."""
    new = stats.add(trace)
    group.transition_counts.update(trace.transitions)
    group.consecutive_runs += 1
    group.total_runs += 1
    if new:
        group.stagnant_runs = 0
        group.runs_without_new = 0
    else:
        group.stagnant_runs += 1
        group.runs_without_new += 1
    if outcome in ("unknown", "timeout"):
        group.unknown_count += 1
    group.timeout_streak = group.timeout_streak + 1 if outcome == "timeout" else 0
    if bug:
        group.bug_count += 1
    if weights is not None and ident is not None:
        weights.record(ident, new)
    return new


class Scheduler:
    """Holds the groups and statistics of one session.

    With several workers, ``slots`` groups are active at once; each slot
    sticks to its group until :func:`should_switch` says otherwise.
    """

    def __init__(self, groups: list[SeedGroup], heuristic="default", slots: int = 1,
                 stats: TransitionStats | None = None, weights: MutationWeights | None = None,
                 adapt_weights: bool = True):
        self.groups = groups
        self.by_id = {g.seed_id: g for g in groups}
        self.heuristic = parse_heuristic(heuristic)
        self.stats = stats or TransitionStats()
        self.weights = weights or MutationWeights()
        self.adapt_weights = adapt_weights
        self.runs = 0
        self.weight_updates = 0
        self.switches: Counter = Counter()
        self.active: list[str | None] = [None] * max(1, slots)
        self._last: str | None = None

    def eligible(self) -> bool:
        return any(not g.retired for g in self.groups)

    def _pick(self, slot: int, leaving: str | None = None) -> str | None:
        others = {a for k, a in enumerate(self.active) if k != slot and a is not None}
        if leaving:
            others.add(leaving)
        pick = select_group(self.heuristic, self.groups, self.stats, after=self._last, exclude=others)
        if pick in {a for k, a in enumerate(self.active) if k != slot}:
            pick = None  # fewer eligible groups than slots
        if pick is not None:
            self._last = pick
        return pick

    def batch(self) -> list[SeedGroup]:
        """The groups to run next, one per filled slot (distinct)."""
        out = []
        for k, sid in enumerate(self.active):
            if sid is None or self.by_id[sid].retired:
                sid = self.active[k] = self._pick(k)
            if sid is not None:
                out.append(self.by_id[sid])
        return out

    def _replace(self, group: SeedGroup):
        if group.seed_id in self.active:
            slot = self.active.index(group.seed_id)
            self.active[slot] = self._pick(slot, leaving=group.seed_id)

    def skip(self, group: SeedGroup):
        """Leave a group on which no mutation applied."""
        self.switches["not-applicable"] += 1
        group.leave()
        self._replace(group)

    def after_run(self, group: SeedGroup) -> tuple[str, str | None]:
        """Apply switch/rollback policy and the periodic weight update."""
        self.runs += 1
        if self.adapt_weights and self.runs % WEIGHT_PERIOD == 0:
            self.weights.update()
            self.weight_updates += 1
            log.info("weights recalculated after %d runs", self.runs)
        action, reason = should_switch(group)
        if action == ROLLBACK:
            log.info("rollback %s (%s)", group.seed_id, reason)
            group.rollback()
        elif action == SWITCH:
            self.switches[reason] += 1
            log.debug("switch from %s (%s)", group.seed_id, reason)
            if reason == "bug-limit":
                group.retired = True
            group.leave()
            self._replace(group)
        return action, reason

    def snapshot(self, **extra) -> dict:
        data = {
            "runs": self.runs,
            "unique_traces": self.stats.unique_traces,
            "weight_updates": self.weight_updates,
            "switches": dict(self.switches),
            "weights": self.weights.snapshot(),
            "groups": {g.seed_id: g.counters() for g in self.groups},
        }
        data.update(extra)
        return data
