import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarm_array.geometry import (
    Point2,
    dist,
    midpoint,
    monotone_along,
    point_line_distance,
    segment,
    segments_properly_intersect,
    squared_dist,
    unit,
)
from swarm_array.oracles import segments_cross

coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
grid = st.integers(-3, 3)


def test_segment_rejects_degenerate():
    with pytest.raises(ValueError):
        segment((1, 1), (1, 1))
    assert segment((0, 0), (1, 2)) == (Point2(0.0, 0.0), Point2(1.0, 2.0))


def test_distances_and_midpoint():
    assert dist((0, 0), (3, 4)) == 5.0
    assert squared_dist((0, 0), (3, 4)) == 25.0
    assert midpoint((0, 0), (2, 4)) == (1.0, 2.0)
    assert unit((0, 2)) == (0.0, 1.0)
    assert point_line_distance((0, 1), (-1, 0), (1, 0)) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "s, t, expected",
    [
        (((0, 0), (2, 2)), ((0, 2), (2, 0)), True),  # proper crossing
        (((0, 0), (1, 0)), ((1, 0), (2, 1)), False),  # shared endpoint only
        (((0, 0), (2, 0)), ((1, 0), (1, 1)), True),  # endpoint inside the other
        (((0, 0), (2, 0)), ((1, 0), (3, 0)), True),  # collinear overlap
        (((0, 0), (1, 0)), ((2, 0), (3, 0)), False),  # collinear, disjoint
        (((0, 0), (1, 0)), ((1, 0), (2, 0)), False),  # collinear, touching at shared end
        (((0, 0), (1, 1)), ((0, 1), (0.4, 0.6)), False),  # near miss
    ],
)
def test_intersection_cases(s, t, expected):
    assert segments_properly_intersect(s, t) is expected
    assert segments_properly_intersect(t, s) is expected


def test_intersection_matches_brute_force_on_random_pairs():
    rng = random.Random(7)
    for _ in range(100_000):
        p = [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)]
        assert segments_properly_intersect((p[0], p[1]), (p[2], p[3])) == segments_cross(*p)


@given(st.lists(st.tuples(grid, grid), min_size=4, max_size=4, unique=True))
def test_intersection_matches_brute_force_on_degenerate_grid(p):
    assert segments_properly_intersect((p[0], p[1]), (p[2], p[3])) == segments_cross(*p)


@given(coord, coord, coord, coord, coord, coord, coord, coord)
def test_intersection_symmetric(a, b, c, d, e, f, g, h):
    s, t = ((a, b), (c, d)), ((e, f), (g, h))
    assert segments_properly_intersect(s, t) == segments_properly_intersect(t, s)


@given(coord, coord, coord, coord)
def test_monotone_flips_with_orientation(a, b, c, d):
    e = ((a, b), (c, d))
    direction = (1.0, 0.5)
    forward = monotone_along(e, direction)
    backward = monotone_along((e[1], e[0]), direction)
    assert not (forward and backward)
    if (c - a) * 1.0 + (d - b) * 0.5 != 0:
        assert forward != backward


def test_unit_is_normalized():
    u = unit((3, -4))
    assert math.hypot(*u) == pytest.approx(1.0)
