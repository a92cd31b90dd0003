"""Command line: ``run`` one scenario, ``sweep`` over n and seeds, ``verify`` a suite.

Exit codes: 0 success, 2 tick budget exhausted, 3 invariant violated or
suite failed, 4 file I/O or scenario format problem.

``SWARM_LOG`` selects what goes into ``trace.jsonl``: ``full`` (default)
writes every event, ``events`` drops per-tick ``move`` and ``deliver``
lines, ``off`` writes no trace.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import suites
from .experiments import fit_summary, run_one, sweep
from .kernel import ProtocolError, SimulationTimeout
from .metrics import Trace, export_csv, to_jsonl
from .model import DisconnectedScenario, Scenario, generate_scenario
from .pipeline import default_budget

EXIT_OK = 0
EXIT_TIMEOUT = 2
EXIT_INVARIANT = 3
EXIT_IO = 4
TOLERANCE = 0.05
TRACE_MODES = ("full", "events", "off")

log = logging.getLogger("swarm_array")


def _trace_mode() -> str:
    mode = os.environ.get("SWARM_LOG", "full").lower()
    if mode not in TRACE_MODES:
        raise SystemExit(f"SWARM_LOG must be one of {', '.join(TRACE_MODES)}")
    return mode


def _positive(v: str) -> int:
    k = int(v)
    if k <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return k


def _at_least_two(v: str) -> int:
    k = int(v)
    if k < 2:
        raise argparse.ArgumentTypeError("n must be at least 2")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarm-array", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def sim_flags(q):
        q.add_argument("--budget", type=_positive, help="tick budget per run (default 200*n+20000)")
        q.add_argument("--collision", choices=("point", "disk"), default="point")
        q.add_argument("--latency", type=_positive, default=1, help="message latency bound L in ticks")
        q.add_argument("--out", type=Path, default=Path("out"), help="output directory")

    run = sub.add_parser("run", help="run one scenario through the full pipeline")
    run.add_argument("--n", type=_at_least_two, default=15)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--scenario", type=Path, help="scenario JSON file (overrides --n/--seed)")
    sim_flags(run)

    sw = sub.add_parser("sweep", help="run every n in a range for several seeds and fit scaling laws")
    sw.add_argument("--n-range", type=int, nargs=3, metavar=("MIN", "MAX", "STEP"), default=(15, 130, 5))
    sw.add_argument("--runs-per-n", type=_positive, default=8)
    sw.add_argument("--seed", type=int, default=0, help="first seed; runs use seed, seed+1, ...")
    sw.add_argument("--jobs", type=_positive, default=1, help="parallel worker processes")
    sim_flags(sw)

    ver = sub.add_parser("verify", help="run a property suite against the oracles")
    ver.add_argument("--suite", choices=suites.SUITES, required=True)
    ver.add_argument("--latency", type=_positive, default=1)
    return p


def cmd_run(args) -> int:
    if args.scenario is not None:
        try:
            scenario = Scenario.load(args.scenario)
        except (OSError, ValueError, KeyError, TypeError) as e:
            print(f"cannot load scenario {args.scenario}: {e}", file=sys.stderr)
            return EXIT_IO
    else:
        scenario = generate_scenario(args.n, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    mode = _trace_mode()
    budget = args.budget or default_budget(scenario.n)
    log.info("run n=%d seed=%d latency=%d budget=%d", scenario.n, scenario.seed, args.latency, budget)
    trace = Trace()
    fh = None if mode == "off" else open(args.out / "trace.jsonl", "w")
    if fh is not None:
        skip = () if mode == "full" else ("move", "deliver")
        trace.listeners.append(lambda ev: ev.kind in skip or fh.write(to_jsonl(ev)))
    try:
        summary = run_one(
            scenario.n,
            scenario.seed,
            latency=args.latency,
            collision=args.collision,
            budget=budget,
            scenario=scenario,
            trace=trace,
        )
    finally:
        if fh is not None:
            fh.close()
    (args.out / "metrics.csv").write_text(export_csv([summary.metrics]))
    problems = summary.failures(TOLERANCE)
    for msg in problems:
        print(f"invariant violated: {msg}", file=sys.stderr)
    m = summary.metrics
    print(f"n={m.n} seed={m.seed} ticks={m.ticks_total} messages={m.messages_total} travel={m.travel_total:.3f}")
    return EXIT_INVARIANT if problems else EXIT_OK


def cmd_sweep(args) -> int:
    lo, hi, step = args.n_range
    if lo < 2 or hi < lo or step <= 0:
        print("--n-range needs 2 <= MIN <= MAX and STEP > 0", file=sys.stderr)
        return EXIT_INVARIANT
    ns = list(range(lo, hi + 1, step))
    seeds = list(range(args.seed, args.seed + args.runs_per_n))
    args.out.mkdir(parents=True, exist_ok=True)
    log.info("sweep n=%s seeds=%s", ns, seeds)
    results = sweep(
        ns, seeds, jobs=args.jobs, latency=args.latency, collision=args.collision, budget=args.budget
    )
    rows = [r.metrics for r in results]
    (args.out / "metrics.csv").write_text(export_csv(rows))
    summary = fit_summary(rows)
    (args.out / "fit.txt").write_text(summary)
    print(summary, end="")
    bad = [(r.metrics.n, r.metrics.seed, f) for r in results for f in r.failures(TOLERANCE)]
    for n, s, f in bad:
        print(f"invariant violated in n={n} seed={s}: {f}", file=sys.stderr)
    return EXIT_INVARIANT if bad else EXIT_OK


def cmd_verify(args) -> int:
    reports = suites.run_suite(args.suite, latency=args.latency)
    for r in reports:
        print(r.line())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INVARIANT


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except SimulationTimeout as e:
        print(f"timeout: {e}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (ProtocolError, AssertionError, DisconnectedScenario) as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
