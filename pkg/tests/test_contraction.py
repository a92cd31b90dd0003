from hypothesis import given, settings
from hypothesis import strategies as st

from swarm_array.geometry import monotone_along
from swarm_array.kernel import Phase
from swarm_array.model import generate_scenario
from swarm_array.pipeline import central_path, make_world
from swarm_array.suites import CrossingWatch


def sorting_started(w):
    return any(r.phase >= Phase.SORT for r in w.robots)


def contract(n, seed, latency=1):
    s = generate_scenario(n, seed)
    w = make_world(s, latency=latency)
    watch = CrossingWatch()
    w.hooks.append(watch)
    w.run_until(sorting_started, 200 * n + 20000)
    return s, w, watch


def test_everyone_joins_a_monotone_list():
    s, w, watch = contract(30, 4)
    path = central_path(w)
    assert sorted(path) == list(range(30))
    assert path[0] == s.min_index and path[-1] == s.max_index
    toward_min = w.robots[path[1]].proto["contract"].toward_min
    for a, b in zip(path, path[1:]):
        ra, rb = w.robots[a], w.robots[b]
        assert ra.succ == b and rb.pred == a
        assert monotone_along(((rb.x, rb.y), (ra.x, ra.y)), toward_min)
    assert not watch.failures and watch.ticks_checked > 0


def test_endpoints_stay_put():
    s, w, _ = contract(25, 1)
    assert w.robots[s.min_index].odometer == 0.0
    assert w.robots[s.max_index].odometer == 0.0


def test_integrations_are_traced():
    s, w, _ = contract(20, 2)
    integrated = w.metrics.messages_by_kind["Accept"]
    offers = w.metrics.messages_by_kind["Offer"]
    assert offers == integrated + w.metrics.messages_by_kind["Reject"]
    assert integrated > 0


@settings(max_examples=8)
@given(st.integers(3, 30), st.integers(0, 10**6), st.integers(1, 3))
def test_contraction_terminates_crossing_free(n, seed, latency):
    s, w, watch = contract(n, seed, latency)
    assert sorted(central_path(w)) == list(range(n))
    assert not watch.failures
    assert w.metrics.out_of_range_sends == 0
