"""Child-process execution with a hard timeout that kills the whole tree."""
from __future__ import annotations

import os
import shutil
import signal
import subprocess
import time
from dataclasses import dataclass


class HarnessError(RuntimeError):
    """The harness itself failed (missing binary, I/O), as opposed to a
    solver misbehaving."""


class SolverNotFound(HarnessError):
    pass


@dataclass(frozen=True)
class RawRun:
    stdout: str
    stderr: str
    returncode: int | None
    timed_out: bool
    wall_time: float


def resolve_binary(path: str) -> str:
    found = shutil.which(path)
    if found is None:
        raise SolverNotFound(f"solver binary not found: {path}")
    return os.path.abspath(found) if os.sep in found else found


def _kill_tree(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass


def run(argv: list[str], stdin_text: str | None = None, timeout: float = 60.0,
        cwd: str | None = None) -> RawRun:
    """Run ``argv``, feeding ``stdin_text``; kill the process group on timeout.

    The child is started in its own session so that anything it spawns dies
    with it.
    """
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE if stdin_text is not None else subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=cwd,
            start_new_session=True,
            text=True,
            errors="replace",
        )
    except FileNotFoundError as exc:
        raise SolverNotFound(str(exc)) from exc
    except OSError as exc:
        raise HarnessError(f"cannot start {argv[0]}: {exc}") from exc
    timed_out = False
    try:
        out, err = proc.communicate(stdin_text, timeout=timeout)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_tree(proc)
        out, err = proc.communicate()
    finally:
        # reap stragglers that may have escaped into the group
        if proc.poll() is None:
            _kill_tree(proc)
            proc.wait()
    # grandchildren that outlived the leader still share its process group
    _kill_tree(proc)
    wall = time.monotonic() - start
    if timed_out:
        wall = max(wall, timeout)
    return RawRun(out or "", err or "", proc.returncode, timed_out, wall)
