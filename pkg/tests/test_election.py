from hypothesis import given, settings
from hypothesis import strategies as st

from swarm_array.kernel import Phase
from swarm_array.model import Scenario, generate_scenario
from swarm_array.oracles import extrema
from swarm_array.pipeline import make_world
from swarm_array.suites import leader_once


def released(w):
    return all(r.phase >= Phase.PATH for r in w.robots)


def test_two_robots():
    s = Scenario(2, 0, [(0, 0), (1, 0)], [2, 1])
    w = make_world(s)
    w.run_until(released, 200)
    assert all(r.proto["extrema"] == (1, 2) for r in w.robots)


def test_only_extremal_claims_complete():
    s = generate_scenario(20, 3)
    w = make_world(s)
    w.run_until(released, 2000)
    flags = [(r.proto["election"].is_min, r.proto["election"].is_max) for r in w.robots]
    assert flags.count((True, False)) == 1 and flags.count((False, True)) == 1
    assert flags[s.min_index] == (True, False)
    assert flags[s.max_index] == (False, True)


def test_no_motion_and_no_path_traffic_before_release():
    s = generate_scenario(30, 1)
    w = make_world(s)
    w.run_until(released, 3000)
    assert w.metrics.travel_total == 0.0
    assert w.metrics.messages_by_kind["LeaderDone"] == 30


@settings(max_examples=25)
@given(st.integers(2, 50), st.integers(0, 10**6), st.integers(1, 3))
def test_matches_global_scan(n, seed, latency):
    s = generate_scenario(n, seed)
    r = leader_once(s, latency)
    assert r == {"extrema": True, "still": True, "min_last": True}
    assert extrema(s.labels) == (1, n)
