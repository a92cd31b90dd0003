"""Deterministic tick-driven execution.

One tick: deliver due messages, run every robot's controller in index
order, then integrate motion under the ``v_max / tick_rate`` step cap.
Controllers only touch the world through the methods on ``World`` that take
the acting robot (``send``, ``broadcast``, ``sense``, ``set_target``), which
enforce the local communication and sensing model.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Any, Callable

import numpy as np

from .geometry import Point2
from .metrics import RunMetrics, Trace
from .model import Scenario, build_comm_graph, is_connected

BROADCAST = -1
CLIP_HALVINGS = 20


class Phase(IntEnum):
    LEADER = 0
    PATH = 1
    CONTRACT = 2
    SORT = 3
    DONE = 4


PHASE_NAMES = {
    Phase.LEADER: "leader",
    Phase.PATH: "path",
    Phase.CONTRACT: "contract_straighten",
    Phase.SORT: "sort",
    Phase.DONE: "done",
}


class Kind(str, Enum):
    WAVE_FORWARD = "WaveForward"
    WAVE_ECHO = "WaveEcho"
    LEADER_DONE = "LeaderDone"
    DIST_UPDATE = "DistUpdate"
    PATH_JOIN = "PathJoin"
    OFFER = "Offer"
    ACCEPT = "Accept"
    REJECT = "Reject"
    READY = "Ready"
    INIT = "Init"
    RET = "Ret"
    TERMINATE = "Terminate"
    PLACE = "Place"


class ProtocolError(RuntimeError):
    """A controller observed a state its protocol rules out."""


class SimulationTimeout(RuntimeError):
    def __init__(self, ticks: int, world: World):
        super().__init__(f"stop condition not reached within {ticks} ticks")
        self.world = world


@dataclass(slots=True)
class Message:
    sender: int
    recipient: int
    kind: Kind
    data: dict
    sent_tick: int
    phase: Phase


@dataclass(eq=False)
class RobotState:
    index: int
    label: int
    x: float
    y: float
    phase: Phase = Phase.LEADER
    odometer: float = 0.0
    target: tuple[float, float] | None = None
    clip: bool = False
    buffer: list = field(default_factory=list)
    # doubly linked list, stored as robot indices
    on_path: bool = False
    pred: int | None = None
    succ: int | None = None
    # per-protocol scratch, filled in by the phase modules
    proto: dict[str, Any] = field(default_factory=dict)

    @property
    def position(self) -> Point2:
        return Point2(self.x, self.y)


Controller = Callable[["World", RobotState], None]


class World:
    """Mutable simulation state plus the kernel operations."""

    def __init__(
        self,
        scenario: Scenario,
        controller: Controller,
        *,
        latency: int = 1,
        collision: str = "point",
        trace: Trace | None = None,
        check_connectivity: bool = False,
    ):
        if latency < 1:
            raise ValueError("latency bound must be at least one tick")
        if collision not in ("point", "disk"):
            raise ValueError(f"unknown collision mode {collision!r}")
        self.scenario = scenario
        self.params = scenario.params
        self.controller = controller
        self.latency = latency
        self.collision = collision
        self.check_connectivity = check_connectivity
        self.tick = 0
        self.robots = [
            RobotState(i, lab, p[0], p[1]) for i, (p, lab) in enumerate(zip(scenario.positions, scenario.labels))
        ]
        self.by_label = {r.label: r.index for r in self.robots}
        self.in_flight: dict[int, list[Message]] = {}
        self._last_due: dict[int, int] = {}
        self._rng = random.Random(scenario.seed)
        self.metrics = RunMetrics(n=scenario.n, seed=scenario.seed, D=scenario.diameter())
        self.trace = trace if trace is not None else Trace()
        self.trace.attach(self.metrics)
        self._xy = np.array([[r.x, r.y] for r in self.robots])
        self._xy_dirty = False
        self._nbr_cache: dict[int, list[int]] = {}
        self._range2 = self.params.comm_range ** 2
        self.hooks: list[Callable[[World], None]] = []
        self.emit("phase", self.robots[0].index, phase="leader", all=True)

    # -- sensing and communication (controller-facing) --------------------

    @property
    def n(self) -> int:
        return len(self.robots)

    def label(self, i: int) -> int:
        return self.robots[i].label

    def index_of(self, label: int) -> int:
        return self.by_label[label]

    def in_range(self, i: int, j: int) -> bool:
        a, b = self.robots[i], self.robots[j]
        dx, dy = a.x - b.x, a.y - b.y
        return dx * dx + dy * dy <= self._range2

    def neighbors(self, i: int) -> list[int]:
        """Current communication-graph neighbors of robot ``i``."""
        cached = self._nbr_cache.get(i)
        if cached is not None:
            return cached
        if self._xy_dirty:
            self._xy = np.array([[r.x, r.y] for r in self.robots])
            self._xy_dirty = False
        d = self._xy - self._xy[i]
        close = np.flatnonzero(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1] <= self._range2)
        out = [int(j) for j in close if j != i]
        self._nbr_cache[i] = out
        return out

    def sense(self, me: RobotState, j: int) -> Point2 | None:
        """Position of robot ``j`` as seen by ``me``; ``None`` when out of range."""
        if j == me.index:
            return Point2(me.x, me.y)
        if not self.in_range(me.index, j):
            return None
        r = self.robots[j]
        return Point2(r.x, r.y)

    def send(self, me: RobotState, to: int, kind: Kind, **data) -> None:
        if to == me.index:
            raise ProtocolError(f"robot {me.label} sent {kind.value} to itself")
        if not self.in_range(me.index, to):
            self.metrics.out_of_range_sends += 1
        self._post(Message(me.index, to, kind, data, self.tick, me.phase))

    def broadcast(self, me: RobotState, kind: Kind, **data) -> None:
        self._post(Message(me.index, BROADCAST, kind, data, self.tick, me.phase))

    def _post(self, msg: Message) -> None:
        lat = 1 if self.latency == 1 else self._rng.randint(1, self.latency)
        due = max(self.tick + lat, self._last_due.get(msg.sender, 0))
        self._last_due[msg.sender] = due
        self.in_flight.setdefault(due, []).append(msg)
        self.emit(
            "send",
            msg.sender,
            msg=msg.kind.value,
            to=msg.recipient,
            phase=PHASE_NAMES[msg.phase],
            wave=msg.data.get("wave_tag"),
        )

    def set_target(self, me: RobotState, target, clip: bool = False) -> None:
        me.target = None if target is None else (float(target[0]), float(target[1]))
        me.clip = clip

    def set_phase(self, me: RobotState, phase: Phase) -> None:
        me.phase = phase
        self.emit("phase", me.index, phase=PHASE_NAMES[phase])

    def emit(self, kind: str, robot: int, **detail) -> None:
        self.trace.emit(self.tick, kind, robot, detail)

    # -- the tick ---------------------------------------------------------

    def step(self) -> None:
        self._nbr_cache.clear()
        for msg in self.in_flight.pop(self.tick, ()):
            if msg.recipient == BROADCAST:
                recipients = self.neighbors(msg.sender)
            else:
                recipients = (msg.recipient,)
            for r in recipients:
                self.robots[r].buffer.append(msg)
                self.emit("deliver", r, msg=msg.kind.value, sender=msg.sender)
        for robot in self.robots:
            self.controller(self, robot)
        self._integrate_motion()
        for hook in self.hooks:
            hook(self)
        self.tick += 1

    def _integrate_motion(self) -> None:
        step_cap = self.params.max_step
        proposals: dict[int, tuple[float, float]] = {}
        for r in self.robots:
            if r.target is None or r.phase == Phase.DONE:
                continue
            tx, ty = r.target
            dx, dy = tx - r.x, ty - r.y
            d = math.hypot(dx, dy)
            if d == 0.0:
                continue
            if d <= step_cap:
                proposals[r.index] = (tx, ty)
            else:
                f = step_cap / d
                proposals[r.index] = (r.x + dx * f, r.y + dy * f)
        if not proposals:
            return
        if any(self.robots[i].clip for i in proposals):
            self._clip_path_crossings(proposals)
        if self.collision == "disk":
            self._resolve_disk_overlaps(proposals)
        for i, (nx, ny) in proposals.items():
            r = self.robots[i]
            moved = math.hypot(nx - r.x, ny - r.y)
            if moved == 0.0:
                continue
            r.x, r.y = nx, ny
            r.odometer += moved
            self.emit("move", i, x=nx, y=ny, d=moved)
        self._xy_dirty = True
        self._nbr_cache.clear()
        if self.check_connectivity:
            g = build_comm_graph([(r.x, r.y) for r in self.robots], self.params.comm_range)
            if not is_connected(g):
                raise ProtocolError(f"communication graph disconnected at tick {self.tick}")

    def path_edges(self) -> list[tuple[int, int]]:
        """Index pairs ``(u, succ(u))`` of every current path edge."""
        pairs = []
        for r in self.robots:
            if r.on_path and r.succ is not None:
                pairs.append((r.index, r.succ))
        return pairs

    def _clip_path_crossings(self, proposals: dict[int, tuple[float, float]]) -> None:
        pairs = self.path_edges()
        if len(pairs) < 3:
            return
        ia = np.array([p[0] for p in pairs])
        ib = np.array([p[1] for p in pairs])
        cur = np.array([[r.x, r.y] for r in self.robots])
        before = _crossing_pairs(cur, ia, ib)
        movers = {i for i in proposals if self.robots[i].clip}
        scale = {i: 1.0 for i in movers}
        for _ in range(CLIP_HALVINGS + 1):
            new = cur.copy()
            for i, (nx, ny) in proposals.items():
                if i in scale:
                    f = scale[i]
                    new[i] = (cur[i, 0] + f * (nx - cur[i, 0]), cur[i, 1] + f * (ny - cur[i, 1]))
                else:
                    new[i] = (nx, ny)
            fresh = _crossing_pairs(new, ia, ib) - before
            if not fresh:
                break
            guilty = set()
            for e, f2 in fresh:
                guilty.update((int(ia[e]), int(ib[e]), int(ia[f2]), int(ib[f2])))
            guilty &= movers
            if not guilty:
                break
            for i in guilty:
                scale[i] /= 2.0
            self.emit("gtm_clip", -1, robots=sorted(guilty))
        else:
            for i in guilty:
                scale[i] = 0.0
        for i, f in scale.items():
            nx, ny = proposals[i]
            r = self.robots[i]
            proposals[i] = (r.x + f * (nx - r.x), r.y + f * (ny - r.y))

    def _resolve_disk_overlaps(self, proposals: dict[int, tuple[float, float]]) -> None:
        # retreat heuristic: of two overlapping robots, the one farther from
        # its own goal backs off for this tick
        min_gap = 2 * self.params.robot_radius
        pos = {r.index: (r.x, r.y) for r in self.robots}
        pos.update(proposals)

        def goal_dist(i):
            r = self.robots[i]
            if r.target is None:
                return 0.0
            return math.hypot(r.target[0] - pos[i][0], r.target[1] - pos[i][1])

        for i in sorted(proposals):
            xi, yi = pos[i]
            for j, (xj, yj) in pos.items():
                if j == i:
                    continue
                if math.hypot(xi - xj, yi - yj) < min_gap and goal_dist(i) >= goal_dist(j):
                    r = self.robots[i]
                    pos[i] = (r.x, r.y)
                    proposals[i] = (r.x, r.y)
                    break

    # -- driving ------------------------------------------------------------

    def run_until(self, stop: Callable[[World], bool], max_ticks: int) -> int:
        """Step until ``stop(world)`` holds; returns the ticks used.

        Raises ``SimulationTimeout`` when the budget runs out.
        """
        if max_ticks <= 0:
            raise ValueError("max_ticks must be positive")
        used = 0
        while not stop(self):
            if used >= max_ticks:
                raise SimulationTimeout(max_ticks, self)
            self.step()
            used += 1
        return used


def _crossing_pairs(xy: np.ndarray, ia: np.ndarray, ib: np.ndarray) -> set[tuple[int, int]]:
    """Indices (e, f), e < f, of path edges whose interiors properly cross."""
    a, b = xy[ia], xy[ib]
    m = len(ia)
    # cheap bounding-box prefilter
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    ov = (lo[:, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[:, None, 0])
    ov &= (lo[:, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[:, None, 1])
    shared = (ia[:, None] == ia[None, :]) | (ia[:, None] == ib[None, :])
    shared |= (ib[:, None] == ia[None, :]) | (ib[:, None] == ib[None, :])
    ov &= ~shared
    ov &= np.triu(np.ones((m, m), dtype=bool), 1)
    e, f = np.nonzero(ov)
    if len(e) == 0:
        return set()
    A, B, C, D = a[e], b[e], a[f], b[f]

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])

    d1, d2 = orient(C, D, A), orient(C, D, B)
    d3, d4 = orient(A, B, C), orient(A, B, D)
    hit = (d1 * d2 < 0) & (d3 * d4 < 0)
    return {(int(x), int(y)) for x, y in zip(e[hit], f[hit])}


def take_inbox(robot: RobotState) -> list:
    """Messages for the robot's current phase.

    Earlier-phase leftovers are dropped, later-phase messages stay buffered.
    """
    now, keep = [], []
    for m in robot.buffer:
        if m.phase == robot.phase:
            now.append(m)
        elif m.phase > robot.phase:
            keep.append(m)
    robot.buffer = keep
    return now


def move_towards(r: RobotState, target, dt: float, v_max: float) -> RobotState:
    """Advance ``r`` at most ``v_max * dt`` along the straight line to ``target``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    dx, dy = target[0] - r.x, target[1] - r.y
    d = math.hypot(dx, dy)
    step = v_max * dt
    if d <= step:
        moved, r.x, r.y = d, float(target[0]), float(target[1])
    else:
        moved = step
        r.x += dx * step / d
        r.y += dy * step / d
    r.odometer += moved
    return r
