"""External solver execution, verdicts, models and execution traces."""
from .process import HarnessError, RawRun, SolverNotFound, run
from .solve import SolveResult, SolverConfig, SolverVerdict, classify_output, resolve_profile, solve
from .trace import PROFILES, TraceProfile, TraceSummary, normalize_trace, state_id, trace_hash

__all__ = [
    "HarnessError", "PROFILES", "RawRun", "SolveResult", "SolverConfig", "SolverNotFound",
    "SolverVerdict", "TraceProfile", "TraceSummary", "classify_output", "normalize_trace",
    "resolve_profile", "run", "solve", "state_id", "trace_hash",
]
