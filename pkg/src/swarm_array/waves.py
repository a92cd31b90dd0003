"""Echo waves as a reusable per-robot state machine.

A wave floods out from its initiator, every robot remembers the neighbor it
first heard the wave from as its predecessor, and echoes back once every
other participating neighbor has either echoed or sent the wave across a
cross edge. The initiator finishing certifies that everybody took part.

Waves are identified by ``(tag, initiator_label, seq)`` tuples. The robot's
live waves sit in ``robot.proto["waves"]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .kernel import Kind, Message, ProtocolError, RobotState, World


@dataclass
class WaveConfig:
    tag: str
    # participating neighbors; evaluated when the robot forwards
    neighbors: Callable[[World, RobotState], Iterable[int]] | None = None
    # send the forward as one radio broadcast (all neighbors participate)
    broadcast: bool = False
    forward_guard: Callable[[World, RobotState], bool] | None = None
    # when the forward guard fails: wait for it (False) or echo at once,
    # marking the state ``blocked`` (True)
    bounce: bool = False
    echo_guard: Callable[[World, RobotState], bool] | None = None
    # own contribution to the echo, folded with the children's echoes
    local: Callable[[World, RobotState, Any], Any] | None = None
    fold: Callable[[Any, Any], Any] | None = None


@dataclass
class WaveState:
    wave_id: tuple
    predecessor: int | None
    payload: Any = None
    pending: set = field(default_factory=set)
    heard: set = field(default_factory=set)
    folded: Any = None
    forwarded: bool = False
    blocked: bool = False
    finished: bool = False
    finish_tick: int | None = None


def waves_of(robot: RobotState) -> dict:
    return robot.proto.setdefault("waves", {})


def start_wave(world: World, robot: RobotState, cfg: WaveConfig, wave_id: tuple, payload=None) -> WaveState:
    st = WaveState(wave_id, None, payload)
    waves_of(robot)[wave_id] = st
    world.emit("wave", robot.index, event="start", wave=cfg.tag)
    _try_forward(world, robot, cfg, st)
    return st


def handle_wave(world: World, robot: RobotState, msg: Message, cfg: WaveConfig) -> WaveState:
    """Process one WaveForward / WaveEcho belonging to ``cfg``'s family."""
    wid = msg.data["wave_id"]
    waves = waves_of(robot)
    st = waves.get(wid)
    if msg.kind is Kind.WAVE_FORWARD:
        if st is None:
            st = WaveState(wid, msg.sender, msg.data.get("payload"))
            waves[wid] = st
            _try_forward(world, robot, cfg, st)
            return st
        if msg.data.get("pred") == robot.index:
            # our own child's broadcast; its echo is still to come
            return st
        if st.forwarded:
            st.pending.discard(msg.sender)
        else:
            st.heard.add(msg.sender)
    elif msg.kind is Kind.WAVE_ECHO:
        if st is None:
            raise ProtocolError(f"robot {robot.label}: echo for unknown wave {wid}")
        st.pending.discard(msg.sender)
        if cfg.fold is not None:
            payload = msg.data.get("payload")
            st.folded = payload if st.folded is None else cfg.fold(st.folded, payload)
    else:
        raise ProtocolError(f"{msg.kind} is not a wave message")
    _try_finish(world, robot, cfg, st)
    return st


def poll_wave(world: World, robot: RobotState, cfg: WaveConfig, st: WaveState) -> None:
    """Re-check guards of a wave held back at this robot."""
    if not st.finished:
        if not st.forwarded:
            _try_forward(world, robot, cfg, st)
        else:
            _try_finish(world, robot, cfg, st)


def _try_forward(world, robot, cfg, st):
    if cfg.forward_guard is not None and not cfg.forward_guard(world, robot):
        if cfg.bounce:
            st.blocked = True
            st.forwarded = True
            st.pending = set()
            _try_finish(world, robot, cfg, st)
        return
    if cfg.broadcast:
        nbrs = world.neighbors(robot.index)
    else:
        nbrs = cfg.neighbors(world, robot)
    st.pending = {j for j in nbrs if j != st.predecessor} - st.heard
    st.forwarded = True
    data = {"wave_id": st.wave_id, "payload": st.payload, "pred": st.predecessor, "wave_tag": cfg.tag}
    if cfg.broadcast:
        world.broadcast(robot, Kind.WAVE_FORWARD, **data)
    else:
        for j in sorted(j for j in nbrs if j != st.predecessor):
            world.send(robot, j, Kind.WAVE_FORWARD, **data)
    _try_finish(world, robot, cfg, st)


def _try_finish(world, robot, cfg, st):
    if st.finished or not st.forwarded or st.pending:
        return
    if cfg.echo_guard is not None and not cfg.echo_guard(world, robot):
        return
    if cfg.local is not None:
        own = cfg.local(world, robot, st)
        st.folded = own if st.folded is None else cfg.fold(own, st.folded)
    st.finished = True
    st.finish_tick = world.tick
    world.emit("wave", robot.index, event="finish", wave=cfg.tag)
    if st.predecessor is not None:
        world.send(robot, st.predecessor, Kind.WAVE_ECHO, wave_id=st.wave_id, payload=st.folded, wave_tag=cfg.tag)
