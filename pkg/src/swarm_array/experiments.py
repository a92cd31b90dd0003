"""Single runs with post-run checks, seed sweeps, and scaling fits."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .kernel import Phase, World
from .metrics import RunMetrics, Trace
from .model import Scenario, generate_scenario, target_positions
from .pipeline import run_pipeline

SORT_KINDS = ("Ready", "Init", "Ret")


class SortMessageAudit:
    """Counts sort handshake messages per (wave, robot) from the trace."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.sorted_wave: int | None = None

    def __call__(self, ev) -> None:
        if ev.kind == "send" and ev.detail["msg"] in SORT_KINDS:
            tag = ev.detail["wave"]
            self.counts[(int(tag.split(":")[1]), ev.robot)] += 1
        elif ev.kind == "sorted":
            self.sorted_wave = ev.detail["wave"]

    def violations(self, inner: list[int]) -> list[tuple[int, int, int]]:
        """``(wave, robot, count)`` for every inner robot not sending exactly 3
        messages in a wave that completed before termination."""
        if self.sorted_wave is None:
            return [(-1, -1, 0)]
        bad = []
        for k in range(1, self.sorted_wave + 1):
            for i in inner:
                c = self.counts[(k, i)]
                if c != 3:
                    bad.append((k, i, c))
        return bad


def list_order(world: World) -> list[int]:
    """Labels along the final list, walking right pointers from ``r_min``."""
    lo = min(r.label for r in world.robots)
    order = [lo]
    while True:
        ss = world.robots[world.index_of(order[-1])].proto.get("sort")
        if ss is None or ss.nr is None or len(order) > world.n:
            return order
        order.append(ss.nr)


@dataclass
class RunSummary:
    metrics: RunMetrics
    list_sorted: bool
    max_target_error: float
    endpoint_odometers: tuple[float, float]
    sort_message_violations: list = field(default_factory=list)

    def failures(self, tolerance: float) -> list[str]:
        out = []
        if not self.list_sorted:
            out.append("final list not sorted")
        if self.max_target_error > tolerance:
            out.append(f"robot {self.max_target_error:.4f} m from its target")
        if self.endpoint_odometers != (0.0, 0.0):
            out.append(f"endpoint odometers {self.endpoint_odometers}")
        if self.metrics.out_of_range_sends:
            out.append(f"{self.metrics.out_of_range_sends} sends to robots out of range")
        if self.sort_message_violations:
            out.append(f"sort message count off in {len(self.sort_message_violations)} (wave, robot) slots")
        return out


def summarize(scenario: Scenario, world: World, metrics: RunMetrics, audit: SortMessageAudit | None) -> RunSummary:
    targets = target_positions(scenario)
    err = max(math.hypot(r.x - targets[r.index][0], r.y - targets[r.index][1]) for r in world.robots)
    order = list_order(world)
    inner = [i for i in range(scenario.n) if i not in (scenario.min_index, scenario.max_index)]
    viol = [] if audit is None or scenario.n == 2 else audit.violations(inner)
    return RunSummary(
        metrics,
        order == sorted(scenario.labels) and all(r.phase is Phase.DONE for r in world.robots),
        err,
        (world.robots[scenario.min_index].odometer, world.robots[scenario.max_index].odometer),
        viol,
    )


def run_one(
    n: int,
    seed: int,
    *,
    latency: int = 1,
    collision: str = "point",
    budget: int | None = None,
    scenario: Scenario | None = None,
    trace: Trace | None = None,
) -> RunSummary:
    scenario = scenario or generate_scenario(n, seed)
    trace = trace or Trace()
    audit = SortMessageAudit()
    trace.listeners.append(audit)
    res = run_pipeline(scenario, latency=latency, collision=collision, trace=trace, budget=budget)
    return summarize(scenario, res.world, res.metrics, audit)


def _run_job(args) -> RunSummary:
    n, seed, kw = args
    return run_one(n, seed, **kw)


def sweep(ns, seeds, *, jobs: int = 1, **kw) -> list[RunSummary]:
    """Every (n, seed) pair, returned in (n, seed) order."""
    tasks = [(n, s, kw) for n in ns for s in seeds]
    if jobs <= 1:
        return [_run_job(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_job, tasks))


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    points: int


def fit_linear(x, y) -> LinearFit | None:
    """Least-squares line; ``None`` when fewer than two distinct x values."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(x)) < 2:
        return None
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2, len(x))


def fit_summary(rows: list[RunMetrics]) -> str:
    ns = [m.n for m in rows]
    lines = []
    for name, x, y in (
        ("ticks_total ~ n", ns, [m.ticks_total for m in rows]),
        ("messages_total ~ n^2", [n * n for n in ns], [m.messages_total for m in rows]),
    ):
        f = fit_linear(x, y)
        if f is None:
            lines.append(f"{name}: insufficient points ({len(set(x))} distinct x)")
        else:
            lines.append(f"{name}: slope={f.slope:.6g} intercept={f.intercept:.6g} R2={f.r2:.6f} points={f.points}")
    return "\n".join(lines) + "\n"


def mean_by_n(rows: list[RunMetrics], value) -> dict[int, float]:
    groups: dict[int, list[float]] = {}
    for m in rows:
        groups.setdefault(m.n, []).append(value(m))
    return {n: sum(v) / len(v) for n, v in sorted(groups.items())}


def spread(values) -> float:
    """max/min of positive values."""
    values = list(values)
    return max(values) / min(values)
