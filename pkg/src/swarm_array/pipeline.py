"""Wiring the phase controllers into one run."""

from __future__ import annotations

from dataclasses import dataclass

from . import central_path, contraction, election, wavesort
from .central_path import PathState
from .contraction import ContractionState
from .kernel import Phase, RobotState, World
from .metrics import RunMetrics, Trace
from .model import Scenario

_STEPS = {
    Phase.LEADER: election.step,
    Phase.PATH: central_path.step,
    Phase.CONTRACT: contraction.step,
    Phase.SORT: wavesort.step,
}


def default_budget(n: int) -> int:
    return 200 * n + 20000


def controller(world: World, robot: RobotState) -> None:
    if robot.phase is Phase.DONE:
        robot.buffer.clear()
        return
    _STEPS[robot.phase](world, robot)


def all_done(world: World) -> bool:
    return all(r.phase is Phase.DONE for r in world.robots)


@dataclass
class RunResult:
    world: World
    metrics: RunMetrics
    ticks: int


def make_world(
    scenario: Scenario,
    *,
    latency: int = 1,
    collision: str = "point",
    trace: Trace | None = None,
    check_connectivity: bool = False,
) -> World:
    return World(
        scenario,
        controller,
        latency=latency,
        collision=collision,
        trace=trace,
        check_connectivity=check_connectivity,
    )


def run_pipeline(
    scenario: Scenario,
    *,
    latency: int = 1,
    collision: str = "point",
    trace: Trace | None = None,
    budget: int | None = None,
    hooks=(),
) -> RunResult:
    """Run all four phases until every robot is done.

    Raises ``SimulationTimeout`` past ``budget`` ticks.
    """
    world = make_world(scenario, latency=latency, collision=collision, trace=trace)
    world.hooks.extend(hooks)
    ticks = world.run_until(all_done, budget or default_budget(scenario.n))
    return RunResult(world, world.metrics.finish(ticks), ticks)


def _chain_controller(world: World, robot: RobotState) -> None:
    if robot.phase is Phase.CONTRACT:
        if any(contraction._is_sortgo(m) for m in robot.buffer):
            contraction.enter_sort(world, robot)
        return
    controller(world, robot)


def chain_world(scenario: Scenario, *, latency: int = 1, trace: Trace | None = None) -> World:
    """A world whose robots already form the straight list in index order.

    Index 0 must hold the smallest label and index n-1 the largest; the
    inner labels may be in any order. Only the sorting phase runs.
    """
    n = scenario.n
    if scenario.min_index != 0 or scenario.max_index != n - 1:
        raise ValueError("chain ends must carry the extreme labels")
    world = World(scenario, _chain_controller, latency=latency, trace=trace)
    p0, p1 = scenario.positions[0], scenario.positions[-1]
    span = (p1[0] - p0[0], p1[1] - p0[1])
    for r in world.robots:
        i = r.index
        r.on_path = True
        r.pred = i - 1 if i > 0 else None
        r.succ = i + 1 if i < n - 1 else None
        ps = PathState(i == 0, i == n - 1, span=span, n=n if i == 0 else None)
        r.proto["path"] = ps
        norm = (span[0] ** 2 + span[1] ** 2) ** 0.5
        r.proto["contract"] = ContractionState(
            i == 0, i == n - 1, (-span[0] / norm, -span[1] / norm), may_move=True, n=n if i == 0 else None
        )
        world.set_phase(r, Phase.CONTRACT)
    contraction.start_sort_at_min(world, world.robots[0])
    return world


def run_chain(scenario: Scenario, *, latency: int = 1, budget: int | None = None) -> RunResult:
    world = chain_world(scenario, latency=latency)
    ticks = world.run_until(all_done, budget or default_budget(scenario.n))
    return RunResult(world, world.metrics.finish(ticks), ticks)


def path_built(world: World) -> bool:
    return all(r.phase >= Phase.CONTRACT for r in world.robots)


def run_until_path(scenario: Scenario, *, latency: int = 1, budget: int | None = None) -> World:
    """Run leader election and path building only."""
    world = make_world(scenario, latency=latency)
    world.run_until(path_built, budget or default_budget(scenario.n))
    return world


def central_path(world: World) -> list[int]:
    """Robot indices along the list, following ``succ`` from ``r_min``."""
    start = next(r.index for r in world.robots if r.on_path and r.pred is None)
    order = [start]
    while world.robots[order[-1]].succ is not None:
        order.append(world.robots[order[-1]].succ)
        if len(order) > world.n:
            raise AssertionError("successor links contain a cycle")
    return order
