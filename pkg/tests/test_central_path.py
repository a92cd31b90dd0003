import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarm_array.geometry import squared_dist
from swarm_array.model import Scenario, generate_scenario
from swarm_array.oracles import dijkstra_squared
from swarm_array.pipeline import central_path, run_until_path
from swarm_array.suites import path_matches


def test_triangle_tree():
    s = Scenario(3, 0, [(0, 0), (1, 0), (0.6, 0.5)], [1, 3, 2])
    w = run_until_path(s)
    rs = [r.proto["routing"] for r in w.robots]
    assert rs[1].parent == 0 and rs[2].parent == 0
    assert rs[1].dist == pytest.approx(1.0)
    assert rs[2].dist == pytest.approx(0.61)
    assert central_path(w) == [0, 1]


def test_two_robots_single_edge():
    w = run_until_path(Scenario(2, 0, [(0, 0), (3, 0)], [1, 2]))
    assert central_path(w) == [0, 1]
    assert w.robots[0].proto["path"].span == (3.0, 0.0)


def test_path_graph_tree_is_the_path():
    s = Scenario(5, 0, [(i * 4.0, 0.0) for i in range(5)], [1, 4, 2, 3, 5])
    w = run_until_path(s)
    assert [r.proto["routing"].parent for r in w.robots] == [None, 0, 1, 2, 3]
    assert central_path(w) == [0, 1, 2, 3, 4]


def test_links_and_span_on_larger_scenario():
    s = generate_scenario(60, 2)
    w = run_until_path(s)
    path = central_path(w)
    assert path[0] == s.min_index and path[-1] == s.max_index
    on = {r.index for r in w.robots if r.on_path}
    assert on == set(path)
    for a, b in zip(path, path[1:]):
        assert w.robots[a].succ == b and w.robots[b].pred == a
    vx, vy = w.robots[s.min_index].proto["path"].span
    p0, p1 = s.positions[s.min_index], s.positions[s.max_index]
    assert (vx, vy) == pytest.approx((p1[0] - p0[0], p1[1] - p0[1]))
    assert w.robots[s.min_index].proto["path"].n == 60
    assert w.metrics.travel_total == 0.0
    weight = sum(squared_dist(s.positions[a], s.positions[b]) for a, b in zip(path, path[1:]))
    expect, _ = dijkstra_squared(s.positions, 4.5, s.min_index, s.max_index, labels=s.labels)
    assert weight == pytest.approx(expect, rel=1e-9)


@settings(max_examples=40)
@given(st.integers(2, 40), st.integers(0, 10**6), st.integers(1, 3))
def test_matches_dijkstra_and_crossing_free(n, seed, latency):
    assert path_matches(generate_scenario(n, seed), latency) == (True, True, True)
