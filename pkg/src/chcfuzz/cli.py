"""Command line: ``chcfuzz fuzz | reduce | stats``."""
from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
from pathlib import Path

from .mutations.catalog import TYPE_NAMES
from .orchestrator import SessionConfig, SessionError, fuzz, reduce_finding
from .reducer import StaleFinding
from .runner.process import HarnessError
from .scheduler import parse_heuristic

log = logging.getLogger("chcfuzz")


def _types(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in parts:
        if p not in TYPE_NAMES:
            raise argparse.ArgumentTypeError(f"unknown mutation type {p!r}; choose from {', '.join(TYPE_NAMES)}")
    if not parts:
        raise argparse.ArgumentTypeError("at least one mutation type is required")
    return parts


def _heuristic(text: str) -> str:
    try:
        parse_heuristic(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chcfuzz", description="Mutational fuzzer for CHC solvers.")
    p.add_argument("--log-level", default="INFO", help="logging level (default: INFO)")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fuzz", help="run the fuzzing loop until interrupted")
    f.add_argument("seeds", help="directory of HORN .smt2 seed files")
    f.add_argument("-mutations", "--mutations", type=_types, default=TYPE_NAMES,
                   help="comma-separated mutation types: own,rewrites,parameters (default: all)")
    f.add_argument("-heuristic", "--heuristic", type=_heuristic, default="default",
                   help="default, rare-transitions, complex, simple, or a pair such as complex+rare-transitions")
    f.add_argument("-options", "--options", dest="equiprobable", action="store_true",
                   help="choose mutations equiprobably instead of by weight")
    f.add_argument("--solver", default="z3", help="solver under test (default: z3)")
    f.add_argument("--solver-arg", action="append", default=[], help="extra solver argument (repeatable)")
    f.add_argument("--oracle-solver", default="z3", help="solver used by the oracles and rewrites")
    f.add_argument("--timeout", type=float, default=5.0, help="solver timeout in seconds")
    f.add_argument("--oracle-timeout", type=float, default=10.0)
    f.add_argument("--workers", type=int, default=1)
    f.add_argument("--out-dir", default="out")
    f.add_argument("--seed", type=int, default=0, help="random seed")
    f.add_argument("--max-runs", type=int, default=None, help="stop after this many runs")
    f.add_argument("--duration", type=float, default=None, help="stop after this many seconds")
    f.add_argument("--reduce", action="store_true", help="reduce each finding as it is found")
    f.add_argument("--trace-profile", default="auto", choices=("auto", "verbose", "z3-trace", "none"))

    r = sub.add_parser("reduce", help="minimize a finding directory")
    r.add_argument("finding", help="finding directory written by 'fuzz'")
    r.add_argument("--solver", default=None, help="override the solver recorded in the finding")
    r.add_argument("--budget", type=int, default=2000, help="maximum predicate evaluations")

    s = sub.add_parser("stats", help="print a session's statistics snapshot")
    s.add_argument("out_dir", nargs="?", default="out")
    s.add_argument("--json", action="store_true", help="print the raw JSON")
    return p


def _print_stats(data: dict) -> None:
    print(f"runs:           {data['runs']}")
    print(f"unique traces:  {data['unique_traces']} (seeds alone: {data.get('baseline_traces', '?')})")
    print(f"runs/second:    {data.get('runs_per_second', 0)}")
    print(f"findings:       {data.get('findings') or 'none'}")
    print(f"switches:       {data.get('switches') or 'none'}")
    top = sorted(data["weights"].items(), key=lambda kv: -kv[1]["weight"])[:10]
    print("top weights:")
    for ident, w in top:
        print(f"  {ident:40s} {w['weight']:.4f}  ({w['hits']}/{w['applications']})")


def _on_term(signum, frame):
    raise KeyboardInterrupt


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "fuzz":
            signal.signal(signal.SIGTERM, _on_term)
            config = SessionConfig(
                seeds_dir=args.seeds, solver=args.solver, solver_args=tuple(args.solver_arg),
                oracle_solver=args.oracle_solver, timeout_solve=args.timeout,
                timeout_oracle=args.oracle_timeout, workers=args.workers, mutations=args.mutations,
                heuristic=args.heuristic, equiprobable=args.equiprobable, out_dir=args.out_dir,
                random_seed=args.seed, reduce_findings=args.reduce, trace_profile=args.trace_profile,
            )
            summary = fuzz(config, max_runs=args.max_runs, duration=args.duration)
            _print_stats(summary)
        elif args.command == "reduce":
            path = reduce_finding(args.finding, budget=args.budget, solver=args.solver)
            print((path / "reduction.log").read_text().split("\n", 2)[0])
            print(f"wrote {path / 'reduced.smt2'} and {path / 'reduced-chain.json'}")
        elif args.command == "stats":
            data = json.loads((Path(args.out_dir) / "stats.json").read_text())
            if args.json:
                print(json.dumps(data, indent=1))
            else:
                _print_stats(data)
    except (SessionError, HarnessError, StaleFinding, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
