"""Asynchronous odd-even transposition sort along the robot chain.

``r_min`` emits waves of alternating parity. Inside a wave, a master and
the slave to its right exchange READY / INIT / RET with the neighboring
pairs, learn the labels that will flank them afterwards, update their list
pointers and, if out of order, physically swap. Pointers always hold
labels, as in the handshake's messages.

Each role is a generator that yields what it waits for: ``("recv", kind,
label)`` takes the oldest buffered message of that kind from that robot,
``("until", predicate)`` blocks until the predicate holds. The simulation
keeps running while a robot waits.

Termination: INIT carries a sorted flag, ANDed at every hop with
``n_l < ID < n_r``. When it reaches ``r_max`` intact the chain was sorted
before that wave; ``r_max`` sends ``Terminate`` down to ``r_min``, which
answers with a ``Place`` pass that dead-reckons every robot's final slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import midpoint
from .kernel import Kind, Phase, ProtocolError, RobotState, World, take_inbox
from .waves import WaveConfig, handle_wave, poll_wave, waves_of

MASTER = "master"
SLAVE = "slave"


def _path_neighbors(world, robot):
    return {j for j in (robot.pred, robot.succ) if j is not None}


# One-way flood: robots start swapping as soon as the wave passes, so an echo
# could be addressed to a predecessor that has already moved out of range.
SORTGO = WaveConfig("sortgo", neighbors=_path_neighbors, echo_guard=lambda w, r: False)


@dataclass
class SortState:
    role: str
    nl: int | None
    nr: int | None
    cap: int | None = None
    msgs: list = field(default_factory=list)
    gen: object = None
    waiting: tuple | None = None
    busy: bool = False
    wave: int = 0
    swapping: bool = False
    waypoints: list = field(default_factory=list)
    terminated: bool = False
    placing: bool = False


def begin(world: World, robot: RobotState) -> SortState:
    cs = robot.proto["contract"]
    role = "min" if cs.is_min else "max" if cs.is_max else "inner"
    nl = None if robot.pred is None else world.label(robot.pred)
    nr = None if robot.succ is None else world.label(robot.succ)
    ss = SortState(role, nl, nr, cap=cs.n)
    robot.proto["sort"] = ss
    program = {"min": _min_robot, "max": _max_robot, "inner": _inner_robot}[role]
    ss.gen = program(world, robot, ss)
    ss.waiting = next(ss.gen)
    return ss


def _send(world, robot, ss, to_label, kind, wave, **data):
    world.send(robot, world.index_of(to_label), kind, wave_tag=f"sort:{wave}", **data)


def _min_robot(world, robot, ss):
    me = robot.label
    m = MASTER
    while ss.cap is None or ss.wave < ss.cap:
        yield ("recv", Kind.READY, ss.nr)
        ss.wave += 1
        world.emit("wave_start", robot.index, parity=m, index=ss.wave)
        _send(world, robot, ss, ss.nr, Kind.INIT, ss.wave, m=m, l=me, s=True)
        ret = yield ("recv", Kind.RET, ss.nr)
        if m == MASTER:
            # a slave's RET names the right pair's future left robot, not ours
            ss.nr = min(ss.nr, ret.data["r"])
        m = SLAVE if m == MASTER else MASTER
    yield ("until", lambda: False)


def _max_robot(world, robot, ss):
    me = robot.label
    while True:
        yield ("until", lambda: world.in_range(robot.index, world.index_of(ss.nl)))
        _send(world, robot, ss, ss.nl, Kind.READY, ss.wave + 1)
        init = yield ("recv", Kind.INIT, ss.nl)
        ss.wave += 1
        _send(world, robot, ss, ss.nl, Kind.RET, ss.wave, r=me)
        if init.data["s"] and ss.nl < me:
            world.emit("sorted", robot.index, wave=ss.wave)
            ss.terminated = True
            world.emit("terminate", robot.index)
            _send(world, robot, ss, ss.nl, Kind.TERMINATE, ss.wave)
            return
        if init.data["m"] == MASTER:
            # addressed as master: the sender was a slave announcing position 3
            ss.nl = max(ss.nl, init.data["l"])


def _inner_robot(world, robot, ss):
    me = robot.label
    while True:
        yield ("until", lambda: world.in_range(robot.index, world.index_of(ss.nl)))
        _send(world, robot, ss, ss.nl, Kind.READY, ss.wave + 1)
        init = yield ("recv", Kind.INIT, ss.nl)
        ss.busy = True
        ss.wave += 1
        m, l = init.data["m"], init.data["l"]
        s = init.data["s"] and ss.nl < me < ss.nr
        if m == MASTER:
            _send(world, robot, ss, ss.nl, Kind.RET, ss.wave, r=min(me, ss.nr))
            yield ("recv", Kind.READY, ss.nr)
            _send(world, robot, ss, ss.nr, Kind.INIT, ss.wave, m=SLAVE, l=l, s=s)
            ret = yield ("recv", Kind.RET, ss.nr)
            r = ret.data["r"]
            if ss.nr < me:
                partner = ss.nr
                ss.nl, ss.nr = ss.nr, r
                world.emit("swap", robot.index, pair=[me, partner], wave=ss.wave)
                _begin_swap(world, robot, ss, partner, sidestep=True)
                yield ("until", lambda: not ss.swapping)
            else:
                ss.nl = l
        else:
            yield ("recv", Kind.READY, ss.nr)
            _send(world, robot, ss, ss.nr, Kind.INIT, ss.wave, m=MASTER, l=max(me, ss.nl), s=s)
            ret = yield ("recv", Kind.RET, ss.nr)
            r = ret.data["r"]
            _send(world, robot, ss, ss.nl, Kind.RET, ss.wave, r=r)
            if ss.nl > me:
                partner = ss.nl
                ss.nr, ss.nl = ss.nl, l
                _begin_swap(world, robot, ss, partner, sidestep=False)
                yield ("until", lambda: not ss.swapping)
            else:
                ss.nr = r
        ss.busy = False


def _begin_swap(world, robot, ss, partner_label, sidestep):
    there = world.sense(robot, world.index_of(partner_label))
    if there is None:
        raise ProtocolError(f"robot {robot.label} cannot see swap partner {partner_label}")
    here = (robot.x, robot.y)
    waypoints = [tuple(there)]
    if sidestep:
        dx, dy = there[0] - here[0], there[1] - here[1]
        d = math.hypot(dx, dy)
        if d > 0:
            off = 2 * world.params.robot_radius / d
            mid = midpoint(here, there)
            waypoints.insert(0, (mid[0] + dy * off, mid[1] - dx * off))
    ss.waypoints = waypoints
    ss.swapping = True


def _take(ss, kind, sender):
    for k, msg in enumerate(ss.msgs):
        if msg.kind is kind and msg.sender == sender:
            del ss.msgs[k]
            return msg
    return None


def _advance(world, robot, ss):
    while ss.gen is not None and not ss.terminated:
        w = ss.waiting
        if w[0] == "recv":
            value = _take(ss, w[1], world.index_of(w[2]))
            if value is None:
                return
        elif w[1]():
            value = None
        else:
            return
        try:
            ss.waiting = ss.gen.send(value)
        except StopIteration:
            ss.gen = None


def _on_terminate(world, robot, ss):
    if ss.terminated and ss.role != "max":
        return
    ss.terminated = True
    ss.gen = None
    ss.swapping = False
    world.set_target(robot, None)
    if ss.role == "max":
        return
    world.emit("terminate", robot.index)
    if ss.role == "min":
        _send_place(world, robot, ss, 2, robot.proto["contract"].n, 0.0, 0.0)
        _finish(world, robot)
    else:
        _send(world, robot, ss, ss.nl, Kind.TERMINATE, ss.wave)


def _send_place(world, robot, ss, index, n, ox, oy):
    there = world.sense(robot, world.index_of(ss.nr))
    if there is None:
        raise ProtocolError(f"robot {robot.label} lost sight of its right neighbor")
    world.send(
        robot,
        world.index_of(ss.nr),
        Kind.PLACE,
        i=index,
        n=n,
        ox=ox + there[0] - robot.x,
        oy=oy + there[1] - robot.y,
    )


def _on_place(world, robot, ss, msg):
    ss.terminated = True
    ss.gen = None
    if ss.role == "max":
        _finish(world, robot)
        return
    i, n, ox, oy = msg.data["i"], msg.data["n"], msg.data["ox"], msg.data["oy"]
    _send_place(world, robot, ss, i + 1, n, ox, oy)
    vx, vy = robot.proto["path"].span
    f = (i - 1) / (n - 1)
    target = (robot.x + f * vx - ox, robot.y + f * vy - oy)
    ss.placing = True
    ss.waypoints = [target]
    world.set_target(robot, target)


def _finish(world, robot):
    world.set_target(robot, None)
    world.set_phase(robot, Phase.DONE)


def step(world: World, robot: RobotState) -> None:
    ss = robot.proto["sort"]
    for msg in take_inbox(robot):
        kind = msg.kind
        if kind is Kind.READY or kind is Kind.INIT or kind is Kind.RET:
            ss.msgs.append(msg)
        elif kind is Kind.WAVE_FORWARD or kind is Kind.WAVE_ECHO:
            handle_wave(world, robot, msg, SORTGO)
        elif kind is Kind.TERMINATE:
            # a RET arriving alongside still has to be passed on first
            _advance(world, robot, ss)
            _on_terminate(world, robot, ss)
        elif kind is Kind.PLACE:
            _on_place(world, robot, ss, msg)
    if robot.phase is Phase.DONE:
        return
    for st in list(waves_of(robot).values()):
        if not st.finished:
            poll_wave(world, robot, SORTGO, st)

    if ss.placing:
        if (robot.x, robot.y) == ss.waypoints[-1]:
            _finish(world, robot)
        return
    _advance(world, robot, ss)
    here = (robot.x, robot.y)
    while ss.swapping and ss.waypoints and here == ss.waypoints[0]:
        ss.waypoints.pop(0)
    if ss.swapping and not ss.waypoints:
        ss.swapping = False
        _advance(world, robot, ss)
    if ss.terminated:
        world.set_target(robot, None)
    elif ss.swapping:
        world.set_target(robot, ss.waypoints[0])
    elif ss.role == "inner" and not ss.busy:
        a = world.sense(robot, world.index_of(ss.nl))
        b = world.sense(robot, world.index_of(ss.nr))
        world.set_target(robot, None if a is None or b is None else midpoint(a, b))
    else:
        world.set_target(robot, None)
