import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarm_array.oracles import (
    Unreachable,
    connected,
    dijkstra_squared,
    extrema,
    odd_even_rounds,
    path_crossing_free,
    report,
)


def test_dijkstra_single_edge_and_triangle():
    assert dijkstra_squared([(0, 0), (3, 0)], 4.5, 0, 1) == (9.0, [0, 1])
    d, path = dijkstra_squared([(0, 0), (1, 0), (0.6, 0.5)], 4.5, 0, 1)
    assert path == [0, 1] and d == pytest.approx(1.0)


def test_dijkstra_unreachable():
    with pytest.raises(Unreachable):
        dijkstra_squared([(0, 0), (10, 0)], 4.5, 0, 1)


def test_dijkstra_prefers_many_short_hops():
    # squared weights: two hops of 1 beat one hop of 2
    d, path = dijkstra_squared([(0, 0), (1, 0), (2, 0)], 4.5, 0, 2)
    assert path == [0, 1, 2] and d == 2.0


def test_dijkstra_ties_break_by_label():
    pos = [(0, 0), (1, 0.5), (1, -0.5), (2, 0)]
    _, p1 = dijkstra_squared(pos, 4.5, 0, 3, labels=[1, 2, 3, 4])
    _, p2 = dijkstra_squared(pos, 4.5, 0, 3, labels=[1, 3, 2, 4])
    assert p1 == [0, 1, 3] and p2 == [0, 2, 3]


def test_odd_even_examples():
    assert odd_even_rounds([1, 2, 3]).rounds_used == 0
    r = odd_even_rounds([1, 4, 3, 2, 5], endpoints_fixed=True, first_parity=1)
    assert r.ordered == (1, 2, 3, 4, 5) and r.swap_rounds == (1, 2, 3)


@pytest.mark.parametrize("k", range(1, 11))
def test_odd_even_reversed_worst_case(k):
    labels = [0, *range(k, 0, -1), k + 1]
    # k=2 is a single adjacent inversion that the first round already fixes
    assert odd_even_rounds(labels).rounds_used == {1: 0, 2: 1}.get(k, k)


@given(st.lists(st.integers(), min_size=2, max_size=30, unique=True))
def test_odd_even_sorts_without_pinning(xs):
    r = odd_even_rounds(xs, endpoints_fixed=False, first_parity=0)
    assert list(r.ordered) == sorted(xs)
    assert r.rounds_used <= len(xs)


def test_crossing_free_examples():
    assert path_crossing_free([(0, 0), (1, 0), (2, 1), (2, 3)])
    assert not path_crossing_free([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert path_crossing_free([(0, 0), (1, 0)])


def test_connectivity_and_extrema():
    assert connected([(0, 0), (4.5, 0)], 4.5)
    assert not connected([(0, 0), (4.6, 0)], 4.5)
    labels = list(range(1, 50))
    random.Random(1).shuffle(labels)
    assert extrema(labels) == (1, 49)


def test_report_lines():
    ok = report("x", [1, 2], 3, 3)
    bad = report("y", [1, 2], 3, 4)
    assert ok.passed and not bad.passed
    assert ok.line().startswith("[PASS] x") and bad.line().startswith("[FAIL] y")
    assert ok.digest == report("z", [1, 2], 0, 0).digest
