"""Selective execution traces.

Only the solver's main-loop lines are kept, volatile tokens (numbers, memory
figures, timings) are stripped, and every surviving line becomes a 64-bit
state id.  Adjacent state pairs are the transitions the scheduler counts.
"""
from __future__ import annotations

import hashlib
import re
import struct
from collections import Counter
from dataclasses import dataclass
from functools import cached_property


def state_id(line: str) -> int:
    return int.from_bytes(hashlib.blake2b(line.encode(), digest_size=8).digest(), "big")


def trace_hash(states) -> int:
    h = hashlib.blake2b(digest_size=8)
    for s in states:
        h.update(struct.pack(">Q", s))
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class TraceSummary:
    states: tuple[int, ...] = ()

    @cached_property
    def transitions(self) -> dict[tuple[int, int], int]:
        return dict(Counter(zip(self.states, self.states[1:])))

    @cached_property
    def trace_hash(self) -> int:
        return trace_hash(self.states)

    def __bool__(self) -> bool:
        return bool(self.states)


@dataclass(frozen=True)
class TraceProfile:
    """How to obtain and normalize a trace.

    ``source`` is ``verbose-stream`` (trace read from stderr) or
    ``trace-file`` (trace written to ``trace_file`` in the run directory).
    ``argv`` are extra solver flags that switch tracing on.
    """

    name: str
    source: str
    argv: tuple[str, ...] = ()
    include: tuple[str, ...] = ()
    normalize: tuple[tuple[str, str], ...] = ()
    trace_file: str = ".z3-trace"

    @cached_property
    def _include_re(self):
        return [re.compile(p) for p in self.include]

    @cached_property
    def _normalize_re(self):
        return [(re.compile(p), r) for p, r in self.normalize]

    def keep(self, line: str) -> bool:
        return any(r.search(line) for r in self._include_re)

    def clean(self, line: str) -> str:
        for rx, repl in self._normalize_re:
            line = rx.sub(repl, line)
        return " ".join(line.split())


_STRIP_NUMBERS = (
    (r":(time|before-memory|after-memory)\s+[-\d.]+", ""),
    (r"-?\d+(\.\d+)?", "#"),
)

# Spacer main-loop markers as printed by a release z3 at -v:1.
VERBOSE = TraceProfile(
    name="verbose",
    source="verbose-stream",
    argv=("-v:1",),
    include=(
        r"^\(transform ",
        r"^expand: ",
        r"^\s*create_child: ",
        r"^Entering level",
        r"^Propagating",
        r"^\(spacer::context::",
    ),
    normalize=_STRIP_NUMBERS,
)

# Debug builds: tag headers of the spacer trace channel.
Z3_TRACE = TraceProfile(
    name="z3-trace",
    source="trace-file",
    argv=("-tr:spacer",),
    include=(r"^-------- \[spacer",),
    normalize=_STRIP_NUMBERS,
)

NONE = TraceProfile(name="none", source="verbose-stream")

PROFILES = {p.name: p for p in (VERBOSE, Z3_TRACE, NONE)}


def normalize_trace(raw: bytes | str, profile: TraceProfile) -> TraceSummary:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", "replace")
    states = []
    for line in raw.splitlines():
        if profile.keep(line):
            states.append(state_id(profile.clean(line)))
    return TraceSummary(tuple(states))
