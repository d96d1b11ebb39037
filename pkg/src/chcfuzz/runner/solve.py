"""Run the solver under test on a CHC system and classify what happened."""
from __future__ import annotations

import functools
import logging
import os
import tempfile
from dataclasses import dataclass, field

from ..chc import ChcSystem, Model, parse_model, print_script
from ..chc.sexpr import SmtSyntaxError
from ..chc.system import ChcError
from ..chc.terms import pred_apps
from . import process
from .trace import PROFILES, VERBOSE, Z3_TRACE, TraceProfile, TraceSummary, normalize_trace

log = logging.getLogger(__name__)

OUTCOMES = ("sat", "unsat", "unknown", "timeout", "crash")
DEFAULT_TIMEOUT = 60.0


@dataclass(frozen=True)
class SolverConfig:
    path: str = "z3"
    argv: tuple[str, ...] = ()
    timeout: float = DEFAULT_TIMEOUT
    profile: str = "auto"


@dataclass(frozen=True, eq=False)
class SolverVerdict:
    outcome: str
    wall_time: float = 0.0
    model: Model | None = None
    reason: str = ""
    returncode: int | None = None
    stdout: str = ""
    stderr: str = ""

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome}")

    @property
    def is_sat(self) -> bool:
        return self.outcome == "sat"

    def describe(self) -> str:
        return self.outcome + (f" ({self.reason})" if self.reason else "")


@dataclass(frozen=True)
class SolveResult:
    verdict: SolverVerdict
    trace: TraceSummary = field(default_factory=TraceSummary)
    script: str = ""


@functools.lru_cache(maxsize=None)
def _supports_trace_file(path: str) -> bool:
    try:
        res = process.run([path, *Z3_TRACE.argv, "-in"], "(check-sat)\n", timeout=10)
    except process.HarnessError:
        return False
    return "invalid command line option" not in (res.stdout + res.stderr) and res.returncode == 0


def resolve_profile(config: SolverConfig) -> TraceProfile:
    if config.profile != "auto":
        return PROFILES[config.profile]
    path = process.resolve_binary(config.path)
    return Z3_TRACE if _supports_trace_file(path) else VERBOSE


def classify_output(raw: process.RawRun, system: ChcSystem | None) -> SolverVerdict:
    """Map one child termination onto exactly one outcome."""
    if raw.timed_out:
        return SolverVerdict("timeout", raw.wall_time, reason="timeout",
                             returncode=raw.returncode, stdout=raw.stdout, stderr=raw.stderr)
    lines = raw.stdout.splitlines()
    verdict_idx = None
    for i, line in enumerate(lines):
        if line.strip() in ("sat", "unsat", "unknown"):
            verdict_idx = i
            break
    common = dict(returncode=raw.returncode, stdout=raw.stdout, stderr=raw.stderr)
    if raw.returncode is not None and raw.returncode < 0:
        return SolverVerdict("crash", raw.wall_time, reason=f"killed by signal {-raw.returncode}",
                             **common)
    if verdict_idx is None:
        return SolverVerdict("crash", raw.wall_time,
                             reason=f"no verdict (exit code {raw.returncode})", **common)
    errors = [ln for ln in lines[:verdict_idx] if ln.startswith("(error")]
    if errors:
        return SolverVerdict("crash", raw.wall_time, reason="input rejected: " + errors[0],
                             **common)
    token = lines[verdict_idx].strip()
    if token == "unknown":
        return SolverVerdict("unknown", raw.wall_time, reason="incomplete", **common)
    if token == "unsat":
        return SolverVerdict("unsat", raw.wall_time, **common)
    model_text = "\n".join(lines[verdict_idx + 1:])
    if system is None:
        return SolverVerdict("sat", raw.wall_time, **common)
    try:
        model = parse_model(model_text, system)
    except (SmtSyntaxError, ChcError, ValueError, IndexError) as exc:
        return SolverVerdict("crash", raw.wall_time, reason=f"unparseable model: {exc}", **common)
    used = {a.pred for c in system.clauses for t in (c.body, c.head) for a in pred_apps(t)}
    missing = sorted(used - set(model.definitions))
    if missing:
        reason = "model not produced" if model_text.strip().startswith("(error") else \
            "model lacks " + ", ".join(missing)
        return SolverVerdict("crash", raw.wall_time, reason=reason, **common)
    return SolverVerdict("sat", raw.wall_time, model=model, **common)


def solve(system: ChcSystem, config: SolverConfig, profile: TraceProfile | None = None,
          timeout: float | None = None) -> SolveResult:
    """Print ``system``, run the solver on it and collect verdict and trace."""
    timeout = config.timeout if timeout is None else timeout
    profile = profile or resolve_profile(config)
    binary = process.resolve_binary(config.path)
    script = print_script(system)
    with tempfile.TemporaryDirectory(prefix="chcfuzz-") as tmp:
        path = os.path.join(tmp, "input.smt2")
        try:
            with open(path, "w") as fh:
                fh.write(script)
        except OSError as exc:
            raise process.HarnessError(f"cannot write solver input: {exc}") from exc
        raw = process.run([binary, *config.argv, *profile.argv, path], timeout=timeout, cwd=tmp)
        if profile.source == "trace-file":
            try:
                with open(os.path.join(tmp, profile.trace_file), errors="replace") as fh:
                    trace_text = fh.read()
            except FileNotFoundError:
                trace_text = ""
        else:
            trace_text = raw.stderr
    verdict = classify_output(raw, system)
    return SolveResult(verdict, normalize_trace(trace_text, profile), script)
