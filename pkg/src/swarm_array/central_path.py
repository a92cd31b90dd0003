"""Routing tree rooted at ``r_min`` and the central path extracted from it.

The tree is grown by asynchronous Bellman-Ford relaxation over squared
Euclidean edge weights. Quiescence is detected by repeated echo waves from
``r_min`` that sum per-robot sent/received ``DistUpdate`` counters; two
consecutive waves with identical, balanced totals prove that nothing is in
flight. ``r_max`` then walks ``PathJoin`` up the tree, and ``r_min`` tells
everybody with a final wave whether they made it onto the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .geometry import squared_dist
from .kernel import Kind, Phase, RobotState, World, take_inbox
from .waves import WaveConfig, handle_wave, poll_wave, start_wave, waves_of


def _add_pairs(a, b):
    return (a[0] + b[0], a[1] + b[1])


@dataclass
class RoutingState:
    tree: str
    dist: float = math.inf
    parent: int | None = None
    parent_dist: float = math.inf
    children: set = field(default_factory=set)
    sent: int = 0
    recv: int = 0


def announce(world: World, robot: RobotState, rs: RoutingState) -> None:
    world.broadcast(robot, Kind.DIST_UPDATE, tree=rs.tree, distance=rs.dist, parent=rs.parent)
    rs.sent += len(world.neighbors(robot.index))


def relax(
    world: World,
    robot: RobotState,
    rs: RoutingState,
    msg,
    weight: Callable[[World, RobotState, int], float] | None,
) -> None:
    """Apply one ``DistUpdate``; ``weight=None`` pins this robot's distance."""
    rs.recv += 1
    sender = msg.sender
    if msg.data["parent"] == robot.index:
        rs.children.add(sender)
    else:
        rs.children.discard(sender)
    if weight is None:
        return
    cand = msg.data["distance"] + weight(world, robot, sender)
    if cand < rs.dist or (
        cand == rs.dist
        and rs.parent is not None
        and sender != rs.parent
        and world.label(sender) < world.label(rs.parent)
    ):
        rs.dist = cand
        rs.parent = sender
        rs.parent_dist = msg.data["distance"]
        announce(world, robot, rs)


def quiet_config(tag: str, key: str) -> WaveConfig:
    return WaveConfig(
        tag,
        broadcast=True,
        local=lambda w, r, st: (r.proto[key].sent, r.proto[key].recv),
        fold=_add_pairs,
    )


class QuiescenceDetector:
    """Lives at ``r_min``: re-launches counter waves until two agree."""

    def __init__(self, config: WaveConfig):
        self.config = config
        self.seq = 0
        self.current = None
        self.previous = None
        self.done = False

    def tick(self, world: World, robot: RobotState) -> bool:
        if self.done:
            return True
        if self.current is None:
            self.current = start_wave(world, robot, self.config, (self.config.tag, robot.label, self.seq))
        if self.current.finished:
            totals = self.current.folded
            if totals[0] == totals[1] and totals == self.previous:
                self.done = True
                return True
            self.previous = totals
            self.seq += 1
            self.current = start_wave(world, robot, self.config, (self.config.tag, robot.label, self.seq))
        return False


def _sq_weight(world, robot, j):
    return squared_dist(world.sense(robot, j), (robot.x, robot.y))


R_QUIET = quiet_config("R-quiet", "routing")
R_DONE = WaveConfig("R-done", broadcast=True)
ANNOUNCE = WaveConfig("announce", broadcast=True, local=lambda w, r, st: 1, fold=lambda a, b: a + b)
PATH_CONFIGS = {c.tag: c for c in (R_QUIET, R_DONE, ANNOUNCE)}


@dataclass
class PathState:
    is_min: bool
    is_max: bool
    started: bool = False
    quiet: QuiescenceDetector | None = None
    done_started: bool = False
    joined: bool = False
    # vector from r_min to r_max, learned through the path
    span: tuple[float, float] | None = None
    n: int | None = None


def step(world: World, robot: RobotState) -> None:
    ps = robot.proto.get("path")
    if ps is None:
        lo, hi = robot.proto["extrema"]
        ps = PathState(robot.label == lo, robot.label == hi)
        robot.proto["path"] = ps
        robot.proto["routing"] = RoutingState("R")
    rs = robot.proto["routing"]
    if ps.is_min and not ps.started:
        ps.started = True
        rs.dist = 0.0
        announce(world, robot, rs)
        ps.quiet = QuiescenceDetector(R_QUIET)
    waves = waves_of(robot)
    for msg in take_inbox(robot):
        kind = msg.kind
        if kind is Kind.DIST_UPDATE:
            relax(world, robot, rs, msg, None if ps.is_min else _sq_weight)
        elif kind is Kind.PATH_JOIN:
            _on_path_join(world, robot, ps, rs, msg)
        elif kind is Kind.WAVE_FORWARD or kind is Kind.WAVE_ECHO:
            tag = msg.data["wave_id"][0]
            st = handle_wave(world, robot, msg, PATH_CONFIGS[tag])
            if tag == "R-done" and ps.is_max and not ps.joined:
                ps.joined = True
                robot.on_path = True
                robot.pred = rs.parent
                world.send(robot, rs.parent, Kind.PATH_JOIN, vx=0.0, vy=0.0)
            elif tag == "announce" and st.payload is not None:
                ps.span = tuple(st.payload)
    if ps.quiet is not None and ps.quiet.tick(world, robot) and not ps.done_started:
        ps.done_started = True
        start_wave(world, robot, R_DONE, ("R-done", robot.label, 0))
    for st in list(waves.values()):
        if not st.finished:
            poll_wave(world, robot, PATH_CONFIGS[st.wave_id[0]], st)
    ann = waves.get(("announce", robot.proto["extrema"][0], 0))
    if ann is not None and ann.finished:
        if ps.is_min:
            ps.n = ann.folded
        robot.proto["waves"] = {}
        world.set_phase(robot, Phase.CONTRACT)


def _on_path_join(world, robot, ps, rs, msg):
    here = (robot.x, robot.y)
    there = world.sense(robot, msg.sender)
    vx = msg.data["vx"] + there[0] - here[0]
    vy = msg.data["vy"] + there[1] - here[1]
    robot.on_path = True
    robot.succ = msg.sender
    if ps.is_min:
        robot.pred = None
        ps.span = (vx, vy)
        start_wave(world, robot, ANNOUNCE, ("announce", robot.label, 0), payload=(vx, vy))
    else:
        robot.pred = rs.parent
        world.send(robot, rs.parent, Kind.PATH_JOIN, vx=vx, vy=vy)
