#!/usr/bin/env python3
"""Scripted stand-in for a CHC solver, driven by environment variables.

FAKE_SOLVER_VERDICT  verdict to print (default unsat)
FAKE_SOLVER_TRACE    ``same``: identical trace every run; ``unique``: a new trace every run
FAKE_SOLVER_SLOW_ON  if this text occurs in the input, sleep instead of answering
"""
import os
import sys
import time
import uuid


def main() -> int:
    args = sys.argv[1:]
    if any(a.startswith("-tr") for a in args):
        print("invalid command line option")
        return 1
    path = next((a for a in args if a.endswith(".smt2")), None)
    text = open(path).read() if path else sys.stdin.read()
    slow = os.environ.get("FAKE_SOLVER_SLOW_ON")
    if slow and slow in text:
        time.sleep(60)
    trace = ["Entering level", "Propagating"]
    if os.environ.get("FAKE_SOLVER_TRACE", "same") == "unique":
        # digits are normalized away by the trace profile, so spell the token in letters
        token = uuid.uuid4().hex.translate(str.maketrans("0123456789", "ghijklmnop"))
        trace.append(f"Entering level {token}")
    sys.stderr.write("\n".join(trace) + "\n")
    print(os.environ.get("FAKE_SOLVER_VERDICT", "unsat"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
