#!/usr/bin/env python3
"""Deliberately broken solver: z3, except that it answers ``unsat`` instead
of ``sat`` whenever the input sets an ``fp.`` option (the marker that only
PARAM_TOGGLE mutants carry)."""
import os
import shutil
import subprocess
import sys

MARKER = "(set-option :fp."


def main() -> int:
    z3 = os.environ.get("STUB_REAL_SOLVER") or shutil.which("z3")
    args = sys.argv[1:]
    res = subprocess.run([z3, *args], capture_output=True, text=True)
    path = next((a for a in args if a.endswith(".smt2")), None)
    marked = False
    if path and os.path.exists(path):
        with open(path) as fh:
            marked = MARKER in fh.read()
    out = res.stdout
    lines = out.splitlines()
    if marked and lines and lines[0].strip() == "sat":
        out = "unsat\n"
    sys.stdout.write(out)
    sys.stderr.write(res.stderr)
    return res.returncode if not marked else 0


if __name__ == "__main__":
    sys.exit(main())
