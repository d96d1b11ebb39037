"""The fuzzing session: seed preparation, the main loop and finding reports."""
from __future__ import annotations

import json
import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .chc import ChcError, ChcSystem, SmtSyntaxError, parse_script, print_script
from .mutations import engine
from .mutations.catalog import PARAM_TOGGLE, TYPE_NAMES, option_name, split_identifier
from .mutations.records import MutationChain, MutationRecord, NotApplicable
from .mutations.rewrite import RewriteConfig
from .oracles import (
    CHECK_MODEL, CRASH, HANDLE_BUG, LOG_INFO, MODEL_BUG, SAT_BUG, Finding, OracleConfig,
    OracleSolver, judge, validate_model,
)
from .runner import SolverConfig, solve
from .runner.process import HarnessError
from .scheduler import (
    WEIGHT_PERIOD, MutationWeights, Scheduler, SeedGroup, TransitionStats, choose_mutation, record_run,
)

log = logging.getLogger(__name__)

MAX_RESAMPLES = 10
SNAPSHOT_PERIOD = 500


class SessionError(RuntimeError):
    """The session cannot start or must abort (harness problem, not a solver bug)."""


@dataclass
class SessionConfig:
    seeds_dir: str
    solver: str = "z3"
    solver_args: tuple[str, ...] = ()
    oracle_solver: str = "z3"
    timeout_solve: float = 5.0
    timeout_oracle: float = 10.0
    workers: int = 1
    mutations: tuple[str, ...] = TYPE_NAMES
    heuristic: str = "default"
    equiprobable: bool = False
    out_dir: str = "out"
    random_seed: int = 0
    reduce_findings: bool = False
    trace_profile: str = "auto"

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.mutations = tuple(self.mutations)
        bad = [m for m in self.mutations if m not in TYPE_NAMES]
        if bad or not self.mutations:
            raise ValueError(f"mutation types must be a nonempty subset of {TYPE_NAMES}, got {self.mutations}")

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.solver, tuple(self.solver_args), self.timeout_solve, self.trace_profile)

    @property
    def oracle_config(self) -> OracleConfig:
        return OracleConfig(self.oracle_solver, self.timeout_oracle)

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["mutations"] = list(self.mutations)
        d["solver_args"] = list(self.solver_args)
        return d


def load_seed(path: Path) -> ChcSystem:
    return parse_script(path.read_text())


def prepare_seeds(config: SessionConfig, stats: TransitionStats | None = None) -> list[SeedGroup]:
    """Parse and solve every seed once; only sat/unsat seeds are admitted."""
    seeds_dir = Path(config.seeds_dir)
    files = sorted(p for p in seeds_dir.iterdir() if p.suffix == ".smt2") if seeds_dir.is_dir() else []
    groups = []
    for path in files:
        try:
            system = load_seed(path)
        except (SmtSyntaxError, ChcError) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            continue
        res = solve(system, config.solver_config)
        outcome = res.verdict.outcome
        if outcome not in ("sat", "unsat"):
            log.info("excluding seed %s: %s", path.name, res.verdict.describe())
            continue
        if stats is not None:
            stats.add(res.trace)
        groups.append(SeedGroup(path.stem, system, outcome, index=len(groups)))
    if not groups:
        raise SessionError(f"no admissible seeds in {config.seeds_dir}")
    log.info("admitted %d of %d seeds", len(groups), len(files))
    return groups


def write_finding(finding: Finding, out_dir, counter: int, config: SessionConfig | None = None) -> Path:
    """Persist a finding as a self-contained directory; returns its path."""
    path = Path(out_dir) / "findings" / f"{finding.kind}-{counter:04d}"
    try:
        path.mkdir(parents=True, exist_ok=False)
        if finding.seed is not None:
            (path / "seed.smt2").write_text(print_script(finding.seed))
        if finding.mutant is not None:
            (path / "mutant.smt2").write_text(print_script(finding.mutant))
        chain = finding.chain if isinstance(finding.chain, MutationChain) else MutationChain(finding.seed_id)
        (path / "chain.json").write_text(chain.dumps() + "\n")
        v = finding.mutant_verdict
        (path / "verdicts.txt").write_text(
            f"truth: {finding.truth}\nmutant: {v.outcome}\n" + (f"reason: {v.reason}\n" if v.reason else ""))
        (path / "solver-output.txt").write_text(
            f"exit code: {v.returncode}\n--- stdout ---\n{v.stdout}\n--- stderr ---\n{v.stderr}\n")
        meta = {"kind": finding.kind, "seed_id": finding.seed_id, "truth": finding.truth,
                "mutant": v.outcome, "evidence": finding.evidence}
        if config is not None:
            meta["solver"] = config.solver
            meta["solver_args"] = list(config.solver_args)
            meta["timeout"] = config.timeout_solve
        (path / "finding.json").write_text(json.dumps(meta, indent=1) + "\n")
    except OSError as exc:
        raise SessionError(f"cannot write finding to {path}: {exc}") from exc
    return path


def bug_predicate(kind: str, truth: str, solver: SolverConfig, oracle: OracleSolver):
    """Reproduction check for one finding kind, for use by the reducer."""
    def bug(system: ChcSystem) -> bool:
        v = solve(system, solver).verdict
        if kind == CRASH:
            return v.outcome == "crash"
        if kind == MODEL_BUG:
            return v.outcome == "sat" and v.model is not None and validate_model(system, v.model, oracle).is_bug
        return v.outcome in ("sat", "unsat") and judge(truth, v) == HANDLE_BUG
    return bug


@dataclass
class Job:
    group: SeedGroup
    record: MutationRecord | None = None
    mutant: ChcSystem | None = None
    result: object = None


@dataclass
class Session:
    config: SessionConfig
    groups: list = None
    scheduler: Scheduler = None
    findings: list = field(default_factory=list)
    skipped: int = 0
    started: float = 0.0

    def __post_init__(self):
        self.rng = random.Random(self.config.random_seed)
        self.oracle = OracleSolver(self.config.oracle_config)
        self.rewrite_config = RewriteConfig(self.config.oracle_solver, self.config.timeout_oracle)
        self.out = Path(self.config.out_dir)
        self._runlog = None

    # -- setup ---------------------------------------------------------
    def prepare(self):
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise SessionError(f"output directory not writable: {exc}") from exc
        stats = TransitionStats()
        self.groups = prepare_seeds(self.config, stats)
        self.scheduler = Scheduler(self.groups, self.config.heuristic, self.config.workers,
                                   stats=stats, weights=MutationWeights(),
                                   adapt_weights=not self.config.equiprobable)
        self.baseline_traces = stats.unique_traces
        (self.out / "config.json").write_text(json.dumps(self.config.to_json(), indent=1) + "\n")

    # -- one iteration ---------------------------------------------------
    def _mutate(self, group: SeedGroup) -> Job:
        toggled = {name for name, _ in group.current.options}

        def available(ident: str) -> bool:
            kind, param = split_identifier(ident)
            return not (kind == PARAM_TOGGLE and option_name(param) in toggled)

        for _ in range(MAX_RESAMPLES):
            ident = self._choose(available)
            rec = engine.record_for(ident, self.rng.getrandbits(64))
            try:
                mutant, filled = engine.apply(group.current, rec, self.rewrite_config)
            except NotApplicable as exc:
                log.debug("%s: %s", group.seed_id, exc)
                continue
            return Job(group, filled, mutant)
        self.skipped += 1
        return Job(group)

    def _choose(self, available) -> str:
        return choose_mutation(self.scheduler.weights, self.config.mutations, self.rng,
                               self.config.equiprobable, available)

    def _judge(self, job: Job) -> Finding | None:
        group, verdict = job.group, job.result.verdict
        decision = judge(group.truth, verdict)
        chain = group.chain.append(job.record)
        kind = None
        evidence: dict = {}
        if decision == HANDLE_BUG:
            kind = CRASH if verdict.outcome == "crash" else SAT_BUG
            evidence = {"reason": verdict.reason}
        elif decision == CHECK_MODEL and verdict.model is not None:
            check = validate_model(job.mutant, verdict.model, self.oracle)
            if check.is_bug:
                kind = MODEL_BUG
                evidence = {"clause": check.clause, "witness": check.witness}
        elif decision == LOG_INFO:
            log.debug("%s: %s on mutant", group.seed_id, verdict.describe())
        if kind is None:
            return None
        return Finding(kind, group.seed_id, chain, verdict, group.truth, evidence, job.mutant, group.seed)

    def _record(self, job: Job):
        group = job.group
        if job.record is None:
            return
        finding = self._judge(job)
        new = self.scheduler_record(group, job, finding is not None)
        if finding is not None:
            self.findings.append(finding)
            path = write_finding(finding, self.out, len(self.findings), self.config)
            log.warning("%s on %s -> %s", finding.kind, group.seed_id, path)
            if self.config.reduce_findings:
                reduce_finding(path, self.config)
        else:
            group.chain = group.chain.append(job.record)
            group.current = job.mutant
        action, reason = self.scheduler.after_run(group)
        self._log_run(job, new, finding, action, reason)
        if self.scheduler.runs % SNAPSHOT_PERIOD == 0:
            self.write_snapshot()

    def scheduler_record(self, group, job, bug: bool) -> bool:
        weights = None if self.config.equiprobable else self.scheduler.weights
        return record_run(group, self.scheduler.stats, weights, job.result.verdict.outcome,
                          job.result.trace, job.record.identifier, bug)

    def _log_run(self, job: Job, new: bool, finding, action: str, reason):
        if self._runlog is None:
            self._runlog = open(self.out / "runs.jsonl", "a")
        v = job.result.verdict
        self._runlog.write(json.dumps({
            "run": self.scheduler.runs, "group": job.group.seed_id, "mutation": job.record.identifier,
            "outcome": v.outcome, "time": round(v.wall_time, 4), "new_trace": new,
            "finding": finding.kind if finding else None, "action": action, "reason": reason,
            "weight_updates": self.scheduler.weight_updates,
        }) + "\n")

    # -- main loop ---------------------------------------------------------
    def run(self, max_runs: int | None = None, duration: float | None = None) -> dict:
        if self.scheduler is None:
            self.prepare()
        self.started = time.monotonic()
        solver = self.config.solver_config
        pool = ThreadPoolExecutor(max_workers=self.config.workers)
        try:
            while self.scheduler.eligible():
                if max_runs is not None and self.scheduler.runs >= max_runs:
                    break
                if duration is not None and time.monotonic() - self.started >= duration:
                    break
                jobs = [self._mutate(g) for g in self.scheduler.batch()]
                if max_runs is not None:
                    jobs = jobs[:max(0, max_runs - self.scheduler.runs)]
                live = [j for j in jobs if j.record is not None]
                results = pool.map(lambda j: solve(j.mutant, solver), live)
                for job, res in zip(live, results):
                    job.result = res
                    self._record(job)
                for job in jobs:
                    if job.record is None:
                        # no applicable mutation within the resample cap; move on
                        self.scheduler.skip(job.group)
        except KeyboardInterrupt:
            log.warning("interrupted; flushing statistics")
        except HarnessError as exc:
            raise SessionError(str(exc)) from exc
        finally:
            pool.shutdown(wait=True, cancel_futures=True)
            summary = self.write_snapshot()
            if self._runlog is not None:
                self._runlog.close()
                self._runlog = None
        return summary

    def write_snapshot(self) -> dict:
        findings = {}
        for f in self.findings:
            findings[f.kind] = findings.get(f.kind, 0) + 1
        elapsed = time.monotonic() - self.started if self.started else 0.0
        data = self.scheduler.snapshot(
            baseline_traces=self.baseline_traces, findings=findings, skipped_iterations=self.skipped,
            elapsed=round(elapsed, 3), runs_per_second=round(self.scheduler.runs / elapsed, 3) if elapsed else 0.0,
            weight_period=WEIGHT_PERIOD,
        )
        tmp = self.out / "stats.json.tmp"
        tmp.write_text(json.dumps(data, indent=1) + "\n")
        os.replace(tmp, self.out / "stats.json")
        return data


def fuzz(config: SessionConfig, max_runs: int | None = None, duration: float | None = None) -> dict:
    session = Session(config)
    session.prepare()
    return session.run(max_runs=max_runs, duration=duration)


def load_finding(path) -> tuple[dict, ChcSystem, MutationChain]:
    path = Path(path)
    meta = json.loads((path / "finding.json").read_text())
    seed = parse_script((path / "seed.smt2").read_text())
    chain = MutationChain.loads((path / "chain.json").read_text())
    return meta, seed, chain


def reduce_finding(path, config: SessionConfig | None = None, budget: int = 2000,
                   solver: str | None = None) -> Path:
    """Reduce a finding directory in place: writes reduced-chain.json and reduced.smt2."""
    from .reducer import Budget, reduce_chain, reduce_system
    path = Path(path)
    meta, seed, chain = load_finding(path)
    if config is not None:
        sc, oc = config.solver_config, config.oracle_config
    else:
        sc = SolverConfig(solver or meta.get("solver", "z3"), tuple(meta.get("solver_args", ())),
                          float(meta.get("timeout", 5.0)))
        oc = OracleConfig()
    oracle = OracleSolver(oc)
    rewrite = RewriteConfig(oc.path, oc.timeout)
    bug = bug_predicate(meta["kind"], meta["truth"], sc, oracle)
    b = Budget(budget)
    reduced_chain = reduce_chain(seed, chain, bug, replay=lambda s, r: engine.replay(s, r, rewrite), budget=b)
    (path / "reduced-chain.json").write_text(reduced_chain.dumps() + "\n")
    mutant = engine.replay(seed, reduced_chain, rewrite)
    reduced = reduce_system(mutant, bug, original=mutant, oracle=oracle, budget=b, check_stale=False)
    (path / "reduced.smt2").write_text(print_script(reduced))
    with open(path / "reduction.log", "w") as fh:
        fh.write(f"chain: {len(chain)} -> {len(reduced_chain)} records\n")
        fh.write(f"clauses: {len(mutant.clauses)} -> {len(reduced.clauses)}\n")
        fh.write(f"evaluations: {b.used} of {b.limit}\n")
        for what, ok in b.history:
            fh.write(f"{'keep' if ok else 'reject'}\t{what}\n")
    return path
