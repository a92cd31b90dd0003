"""Extrema finding with competing echo waves.

Every robot starts a min-claim and a max-claim wave carrying its own label.
A robot that already knows a better value neither forwards nor echoes a
claim, so only the true extremal robots complete their waves. ``r_max``
then floods ``LeaderDone``; ``r_min`` waits for that flood and its own
completion, then runs one more wave whose finishers move on to path
building (``r_min`` itself last).
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import Kind, Phase, RobotState, World, take_inbox
from .waves import WaveConfig, handle_wave, start_wave, waves_of

MIN_CLAIM = WaveConfig("min", broadcast=True)
MAX_CLAIM = WaveConfig("max", broadcast=True)
RELEASE = WaveConfig("release", broadcast=True)


@dataclass
class ElectionState:
    best_min: int
    best_max: int
    is_min: bool = False
    is_max: bool = False
    done_seen: bool = False
    release_started: bool = False
    released: bool = False
    release_tick: int | None = None


def _start(world: World, robot: RobotState) -> ElectionState:
    es = ElectionState(robot.label, robot.label)
    robot.proto["election"] = es
    start_wave(world, robot, MIN_CLAIM, ("min", robot.label, 0))
    start_wave(world, robot, MAX_CLAIM, ("max", robot.label, 0))
    return es


def step(world: World, robot: RobotState) -> None:
    es = robot.proto.get("election") or _start(world, robot)
    waves = waves_of(robot)
    for msg in take_inbox(robot):
        if msg.kind is Kind.LEADER_DONE:
            if not es.done_seen:
                es.done_seen = True
                es.best_max = max(es.best_max, msg.data["max"])
                world.broadcast(robot, Kind.LEADER_DONE, max=msg.data["max"])
            continue
        wid = msg.data["wave_id"]
        tag, value = wid[0], wid[1]
        if tag == "min":
            if value > es.best_min:
                continue
            if value < es.best_min:
                waves.pop(("min", es.best_min, 0), None)
                es.best_min = value
            handle_wave(world, robot, msg, MIN_CLAIM)
        elif tag == "max":
            if value < es.best_max:
                continue
            if value > es.best_max:
                waves.pop(("max", es.best_max, 0), None)
                es.best_max = value
            handle_wave(world, robot, msg, MAX_CLAIM)
        elif tag == "release":
            handle_wave(world, robot, msg, RELEASE)

    own_min = waves.get(("min", robot.label, 0))
    if own_min is not None and own_min.finished and not es.is_min:
        es.is_min = True
    own_max = waves.get(("max", robot.label, 0))
    if own_max is not None and own_max.finished and not es.is_max:
        es.is_max = True
        es.done_seen = True
        world.broadcast(robot, Kind.LEADER_DONE, max=robot.label)
    if es.is_min and es.done_seen and not es.release_started:
        es.release_started = True
        start_wave(world, robot, RELEASE, ("release", robot.label, 0))
    rel = waves.get(("release", es.best_min, 0))
    if rel is not None and rel.finished and not es.released:
        es.released = True
        es.release_tick = world.tick
        robot.proto["extrema"] = (es.best_min, es.best_max)
        robot.proto["waves"] = {}
        world.set_phase(robot, Phase.PATH)
