"""Contraction of off-path subtrees, run together with path straightening.

Off-path robots hang in a second routing tree rooted at ``r_min`` in which
path edges weigh zero, so every subtree is attached to some path robot.
An echo wave over that tree hands out motion permits bottom-up (children
finish first and therefore move first). Permitted robots then

* on the path: go to the middle of their two list neighbors, clipped so
  the path never crosses itself;
* off the path: follow their tree parent, or, once the parent is on the
  path, head for the nearest visible path-edge midpoint.

The robot owning a path edge (the one nearer ``r_min``) offers the slot to
an exterior robot sitting on the edge midpoint; ``Accept`` splices it in,
``Reject`` means it already took another offer.

``r_min`` repeatedly sends a wave down the path that is only forwarded by
robots without tree children whose outgoing edge points away from
``r_min``. It counts the robots it visits; a full count of ``n`` releases
the swarm into sorting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .central_path import QuiescenceDetector, RoutingState, announce, quiet_config, relax
from .geometry import dist, midpoint, monotone_along
from . import wavesort
from .kernel import Kind, Phase, RobotState, World, take_inbox
from .waves import WaveConfig, handle_wave, poll_wave, start_wave, waves_of

RETRY_TICKS = 30
REJECT_COOLDOWN = 30


@dataclass
class ContractionState:
    is_min: bool
    is_max: bool
    toward_min: tuple[float, float]
    may_move: bool = False
    outstanding: int | None = None
    cooldown: dict = field(default_factory=dict)
    # r_min only
    n: int | None = None
    quiet: QuiescenceDetector | None = None
    grant_started: bool = False
    term_seq: int = 0
    term_wave: object = None
    next_retry: int = 0
    attempts: int = 0


def _tree_neighbors(world, robot):
    ct = robot.proto["ctree"]
    out = set(ct.children)
    if ct.parent is not None:
        out.add(ct.parent)
    if robot.on_path:
        out.update(j for j in (robot.pred, robot.succ) if j is not None)
    return out


def _path_neighbors(world, robot):
    return {j for j in (robot.pred, robot.succ) if j is not None}


def _edge_monotone(world, robot) -> bool:
    if robot.succ is None:
        return True
    there = world.sense(robot, robot.succ)
    if there is None:
        return False
    cs = robot.proto["contract"]
    return monotone_along((there, (robot.x, robot.y)), cs.toward_min)


def _has_children(world, robot) -> bool:
    # a child out of range can no longer be waited on; the final count of n
    # still guarantees it has joined the path
    return any(world.in_range(robot.index, j) for j in robot.proto["ctree"].children)


def _term_guard(world, robot) -> bool:
    cs = robot.proto["contract"]
    return cs.may_move and cs.outstanding is None and not _has_children(world, robot) and _edge_monotone(world, robot)


def _holding_term_wave(robot) -> bool:
    # path links behind the counting wave must stay put until it echoes,
    # otherwise neighbors disagree on who still owes an echo
    return any(k[0] == "term" and st.forwarded and not st.finished for k, st in waves_of(robot).items())


C_QUIET = quiet_config("C-quiet", "ctree")
GRANT = WaveConfig("grant", neighbors=_tree_neighbors)
TERM = WaveConfig(
    "term",
    neighbors=_path_neighbors,
    forward_guard=_term_guard,
    bounce=True,
    local=lambda w, r, st: 0 if st.blocked else 1,
    fold=lambda a, b: a + b,
)
SORTGO_TAG = "sortgo"
CONTRACT_CONFIGS = {c.tag: c for c in (C_QUIET, GRANT, TERM)}


def _euclid_weight(world, robot, j):
    return dist(world.sense(robot, j), (robot.x, robot.y))


def _init(world: World, robot: RobotState) -> ContractionState:
    ps = robot.proto["path"]
    vx, vy = ps.span
    norm = math.hypot(vx, vy)
    cs = ContractionState(ps.is_min, ps.is_max, (-vx / norm, -vy / norm), n=ps.n)
    robot.proto["contract"] = cs
    ct = RoutingState("C")
    robot.proto["ctree"] = ct
    if robot.on_path:
        ct.dist = 0.0
        ct.parent_dist = 0.0
        announce(world, robot, ct)
    if cs.is_min:
        cs.quiet = QuiescenceDetector(C_QUIET)
    return cs


def step(world: World, robot: RobotState) -> None:
    if any(_is_sortgo(m) for m in robot.buffer):
        enter_sort(world, robot)
        return
    cs = robot.proto.get("contract") or _init(world, robot)
    ct = robot.proto["ctree"]
    for msg in take_inbox(robot):
        kind = msg.kind
        if kind is Kind.DIST_UPDATE:
            relax(world, robot, ct, msg, None if robot.on_path else _euclid_weight)
        elif kind is Kind.WAVE_FORWARD or kind is Kind.WAVE_ECHO:
            st = handle_wave(world, robot, msg, CONTRACT_CONFIGS[msg.data["wave_id"][0]])
            if st.wave_id[0] == "grant" and st.finished:
                cs.may_move = True
        elif kind is Kind.OFFER:
            _on_offer(world, robot, cs, ct, msg)
        elif kind is Kind.ACCEPT:
            _on_accept(world, robot, cs, ct, msg)
        elif kind is Kind.REJECT:
            if cs.outstanding == msg.sender:
                cs.outstanding = None
            cs.cooldown[msg.sender] = world.tick + REJECT_COOLDOWN

    waves = waves_of(robot)
    for st in list(waves.values()):
        if not st.finished:
            poll_wave(world, robot, CONTRACT_CONFIGS[st.wave_id[0]], st)
            if st.wave_id[0] == "grant" and st.finished:
                cs.may_move = True

    if cs.is_min:
        _orchestrate(world, robot, cs, ct)
        if robot.phase is not Phase.CONTRACT:
            return
    if not cs.may_move or cs.is_min or cs.is_max:
        if cs.may_move and robot.on_path and robot.succ is not None:
            _maybe_offer(world, robot, cs)
        return
    if robot.on_path:
        _gtm(world, robot)
        if robot.succ is not None:
            _maybe_offer(world, robot, cs)
    else:
        _contract_motion(world, robot, ct)


def _orchestrate(world, robot, cs, ct):
    if cs.quiet is not None and not cs.grant_started and cs.quiet.tick(world, robot):
        cs.grant_started = True
        st = start_wave(world, robot, GRANT, ("grant", robot.label, 0))
        if st.finished:
            cs.may_move = True
    if not cs.may_move:
        return
    tw = cs.term_wave
    if tw is not None and tw.finished:
        cs.term_wave = None
        world.emit("term_wave", robot.index, count=tw.folded, n=cs.n)
        if tw.folded == cs.n:
            start_sort_at_min(world, robot)
            return
        cs.next_retry = world.tick + RETRY_TICKS
    if cs.term_wave is None and not _has_children(world, robot) and world.tick >= cs.next_retry:
        cs.attempts += 1
        cs.term_wave = start_wave(world, robot, TERM, ("term", robot.label, cs.term_seq))
        cs.term_seq += 1


def _on_offer(world, robot, cs, ct, msg):
    owner = msg.sender
    if robot.on_path or not cs.may_move:
        world.send(robot, owner, Kind.REJECT)
        return
    successor = msg.data["successor"]
    robot.on_path = True
    robot.pred = owner
    robot.succ = successor
    ct.parent = None
    world.set_target(robot, None)
    world.broadcast(robot, Kind.ACCEPT, owner=owner, successor=successor)
    world.emit("integrate", robot.index, owner=owner, exterior=robot.index, successor=successor)


def _on_accept(world, robot, cs, ct, msg):
    ext = msg.sender
    if msg.data["owner"] == robot.index:
        if cs.outstanding != ext:
            raise AssertionError(f"robot {robot.label}: unexpected Accept from {world.label(ext)}")
        robot.succ = ext
        cs.outstanding = None
    if msg.data["successor"] == robot.index:
        robot.pred = ext
    ct.children.discard(ext)
    if ct.parent == ext:
        ct.parent_dist = 0.0


def _maybe_offer(world, robot, cs):
    if cs.outstanding is not None or _holding_term_wave(robot):
        return
    there = world.sense(robot, robot.succ)
    if there is None:
        return
    mid = midpoint((robot.x, robot.y), there)
    delta = world.params.robot_radius
    tick = world.tick
    for j in world.neighbors(robot.index):
        if j == robot.pred or j == robot.succ or cs.cooldown.get(j, -1) > tick:
            continue
        r = world.robots[j]
        if abs(r.x - mid[0]) <= delta and abs(r.y - mid[1]) <= delta and dist((r.x, r.y), mid) <= delta:
            cs.outstanding = j
            world.send(robot, j, Kind.OFFER, owner=robot.index, successor=robot.succ)
            return


def _gtm(world, robot):
    a = world.sense(robot, robot.pred)
    b = world.sense(robot, robot.succ)
    if a is None or b is None:
        world.set_target(robot, None)
        return
    world.set_target(robot, midpoint(a, b), clip=True)


def _contract_motion(world, robot, ct):
    if ct.parent is None:
        world.set_target(robot, None)
        return
    if ct.parent_dist > 0.0:
        world.set_target(robot, world.sense(robot, ct.parent))
        return
    # only edges the parent can also see, so the parent hears our Accept
    anchor = world.sense(robot, ct.parent)
    reach = world.params.comm_range
    best = None
    here = (robot.x, robot.y)
    for j in world.neighbors(robot.index):
        r = world.robots[j]
        if not r.on_path:
            continue
        for u, v in ((j, r.succ), (r.pred, j)):
            if u is None or v is None:
                continue
            pu, pv = world.sense(robot, u), world.sense(robot, v)
            if pu is None or pv is None:
                continue
            if anchor is not None and (dist(pu, anchor) > reach or dist(pv, anchor) > reach):
                continue
            m = midpoint(pu, pv)
            d = dist(m, here)
            if best is None or d < best[0]:
                best = (d, m)
    if best is None:
        world.set_target(robot, world.sense(robot, ct.parent))
    else:
        world.set_target(robot, best[1])


def _is_sortgo(msg) -> bool:
    return msg.kind is Kind.WAVE_FORWARD and msg.data["wave_id"][0] == SORTGO_TAG


def enter_sort(world: World, robot: RobotState) -> None:
    world.set_target(robot, None)
    robot.proto["waves"] = {}
    world.set_phase(robot, Phase.SORT)
    wavesort.begin(world, robot)
    wavesort.step(world, robot)


def start_sort_at_min(world: World, robot: RobotState) -> None:
    world.set_target(robot, None)
    robot.proto["waves"] = {}
    world.set_phase(robot, Phase.SORT)
    wavesort.begin(world, robot)
    start_wave(world, robot, wavesort.SORTGO, (SORTGO_TAG, robot.label, 0))
    wavesort.step(world, robot)
