"""Planar primitives shared by the protocol and the simulator.

Everything is plain 64-bit floating point. Points are ``Point2`` named
tuples, so any ``(x, y)`` tuple is accepted wherever a point is expected.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class Point2(NamedTuple):
    x: float
    y: float


class Segment2(NamedTuple):
    a: Point2
    b: Point2


def segment(a, b) -> Segment2:
    """Build a segment, rejecting the degenerate case ``a == b``."""
    a = Point2(float(a[0]), float(a[1]))
    b = Point2(float(b[0]), float(b[1]))
    if a == b:
        raise ValueError(f"degenerate segment at {a}")
    return Segment2(a, b)


def dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def squared_dist(p, q) -> float:
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    return dx * dx + dy * dy


def midpoint(p, q) -> Point2:
    return Point2((p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0)


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_properly_intersect(s, t) -> bool:
    """True iff the open interiors of ``s`` and ``t`` share a point.

    Segments that only touch at a shared endpoint do not count. Collinear
    overlap of the interiors counts as an intersection.
    """
    a, b = s
    c, d = t
    shared = a == c or a == d or b == c or b == d
    d1 = _orient(c, d, a)
    d2 = _orient(c, d, b)
    d3 = _orient(a, b, c)
    d4 = _orient(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and d2 == 0 and d3 == 0 and d4 == 0:
        # collinear: interiors overlap iff the 1-D open intervals overlap
        if abs(b[0] - a[0]) >= abs(b[1] - a[1]):
            lo1, hi1 = sorted((a[0], b[0]))
            lo2, hi2 = sorted((c[0], d[0]))
        else:
            lo1, hi1 = sorted((a[1], b[1]))
            lo2, hi2 = sorted((c[1], d[1]))
        return min(hi1, hi2) > max(lo1, lo2)
    if shared:
        return False
    # an endpoint lying strictly inside the other segment
    for p, (u, v), o in ((a, (c, d), d1), (b, (c, d), d2), (c, (a, b), d3), (d, (a, b), d4)):
        if o == 0 and _strictly_between(u, v, p):
            return True
    return False


def _strictly_between(u, v, p) -> bool:
    if p == u or p == v:
        return False
    return min(u[0], v[0]) <= p[0] <= max(u[0], v[0]) and min(u[1], v[1]) <= p[1] <= max(u[1], v[1])


def monotone_along(e, direction) -> bool:
    """Strictly positive projection of the oriented edge onto ``direction``."""
    a, b = e
    return (b[0] - a[0]) * direction[0] + (b[1] - a[1]) * direction[1] > 0.0


def unit(v) -> Point2:
    norm = math.hypot(v[0], v[1])
    if norm == 0.0:
        raise ValueError("zero vector has no direction")
    return Point2(v[0] / norm, v[1] / norm)


def point_line_distance(p, a, b) -> float:
    """Distance from ``p`` to the infinite line through ``a`` and ``b``."""
    return abs(_orient(a, b, p)) / dist(a, b)
