import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarm_array.kernel import Kind, Message, Phase, ProtocolError, World, take_inbox
from swarm_array.model import Scenario, generate_scenario
from swarm_array.suites import echo_once
from swarm_array.waves import WaveConfig, handle_wave, poll_wave, start_wave, waves_of


def chain(n):
    return Scenario(n, 0, [(i * 2.0, 0.0) for i in range(n)], list(range(1, n + 1)))


def _run(scenario, cfg, initiator=0, ticks=200, latency=1):
    wid = (cfg.tag, scenario.labels[initiator], 0)

    def ctl(world, robot):
        if world.tick == 0 and robot.index == initiator:
            start_wave(world, robot, cfg, wid)
        for m in take_inbox(robot):
            handle_wave(world, robot, m, cfg)
        st = waves_of(robot).get(wid)
        if st is not None:
            poll_wave(world, robot, cfg, st)

    w = World(scenario, ctl, latency=latency)
    for _ in range(ticks):
        w.step()
    return w, [waves_of(r).get(wid) for r in w.robots]


def test_single_robot_neighborhood_finishes_immediately():
    w, states = _run(chain(2), WaveConfig("t", broadcast=True), ticks=5)
    assert all(s.finished for s in states)
    assert states[0].finish_tick > states[1].finish_tick


def test_fold_counts_participants_on_a_chain():
    cfg = WaveConfig(
        "count",
        neighbors=lambda w, r: [j for j in (r.index - 1, r.index + 1) if 0 <= j < w.n],
        local=lambda w, r, st: 1,
        fold=lambda a, b: a + b,
    )
    w, states = _run(chain(6), cfg)
    assert states[0].folded == 6


def test_forward_guard_holds_the_wave():
    gate = {"open": False}
    cfg = WaveConfig(
        "g",
        neighbors=lambda w, r: [j for j in (r.index - 1, r.index + 1) if 0 <= j < w.n],
        forward_guard=lambda w, r: r.index != 2 or gate["open"],
    )
    w, states = _run(chain(4), cfg, ticks=30)
    assert not states[0].finished and states[3] is None
    gate["open"] = True
    for _ in range(30):
        w.step()
    assert all(waves_of(r)[("g", 1, 0)].finished for r in w.robots)


def test_bounce_reports_blocked_robot():
    cfg = WaveConfig(
        "b",
        neighbors=lambda w, r: [j for j in (r.index - 1, r.index + 1) if 0 <= j < w.n],
        forward_guard=lambda w, r: r.index != 2,
        bounce=True,
        local=lambda w, r, st: 0 if st.blocked else 1,
        fold=lambda a, b: a + b,
    )
    w, states = _run(chain(5), cfg)
    assert states[0].finished and states[0].folded == 2
    assert states[3] is None


def test_echo_for_unknown_wave_is_a_protocol_error():
    w = World(chain(2), lambda w, r: None)
    msg = Message(1, 0, Kind.WAVE_ECHO, {"wave_id": ("x", 9, 0)}, 0, Phase.LEADER)
    with pytest.raises(ProtocolError):
        handle_wave(w, w.robots[0], msg, WaveConfig("x", broadcast=True))


@settings(max_examples=30)
@given(st.integers(2, 40), st.integers(0, 10**6), st.integers(1, 3), st.data())
def test_echo_properties_on_random_graphs(n, seed, latency, data):
    s = generate_scenario(n, seed)
    init = data.draw(st.integers(0, n - 1))
    r = echo_once(s, init, latency)
    assert r["complete"] and r["initiator_last"] and r["tree"]
    assert r["sent"] == {"WaveForward": n, "WaveEcho": n - 1}
