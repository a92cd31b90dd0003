"""Centralized brute-force references for checking the distributed protocols.

Nothing here imports protocol code; the arithmetic is redone from scratch so
that agreement means something.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Sequence


class Unreachable(ValueError):
    pass


@dataclass(frozen=True)
class OracleReport:
    name: str
    digest: str
    expected: Any
    observed: Any
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name} ({self.digest}): expected={self.expected!r} observed={self.observed!r}"


def digest(obj) -> str:
    """Short stable hash of a JSON-serializable input."""
    blob = json.dumps(obj, sort_keys=True, default=list).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def report(name: str, inputs, expected, observed, passed: bool | None = None) -> OracleReport:
    ok = expected == observed if passed is None else passed
    return OracleReport(name, digest(inputs), expected, observed, bool(ok))


def _adjacency(positions, comm_range):
    n = len(positions)
    r2 = comm_range * comm_range
    adj = [[] for _ in range(n)]
    for i in range(n):
        xi, yi = positions[i]
        for j in range(i + 1, n):
            dx, dy = positions[j][0] - xi, positions[j][1] - yi
            if dx * dx + dy * dy <= r2:
                adj[i].append(j)
                adj[j].append(i)
    return adj


def connected(positions, comm_range: float) -> bool:
    """BFS over the unit-disk graph."""
    adj = _adjacency(positions, comm_range)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(positions)


def extrema(labels: Sequence[int]) -> tuple[int, int]:
    lo = hi = labels[0]
    for v in labels[1:]:
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    return lo, hi


def dijkstra_squared(positions, comm_range: float, src: int, dst: int | None = None, labels=None):
    """Squared-Euclidean shortest paths from ``src``.

    Returns ``(dist, parent)`` lists, or ``(distance, path)`` when ``dst`` is
    given. Equal distances are broken toward the parent with smaller label.
    """
    n = len(positions)
    labels = list(range(n)) if labels is None else list(labels)
    adj = _adjacency(positions, comm_range)
    dist = [math.inf] * n
    parent: list[int | None] = [None] * n
    dist[src] = 0.0
    heap = [(0.0, src)]
    done = [False] * n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in adj[u]:
            dx = positions[u][0] - positions[v][0]
            dy = positions[u][1] - positions[v][1]
            cand = d + dx * dx + dy * dy
            if cand < dist[v] or (cand == dist[v] and parent[v] is not None and labels[u] < labels[parent[v]]):
                dist[v] = cand
                parent[v] = u
                heapq.heappush(heap, (cand, v))
    if dst is None:
        return dist, parent
    if math.isinf(dist[dst]):
        raise Unreachable(f"vertex {dst} unreachable from {src}")
    path = [dst]
    while path[-1] != src:
        path.append(parent[path[-1]])
    path.reverse()
    return dist[dst], path


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p, a, b):
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_cross(a, b, c, d) -> bool:
    """Brute-force intersection test; meeting only at a shared endpoint is allowed."""
    a, b, c, d = tuple(a), tuple(b), tuple(c), tuple(d)
    shared = {a, b} & {c, d}
    if shared:
        if len(shared) == 2:
            return True
        q = shared.pop()
        p = b if a == q else a
        r = d if c == q else c
        # only a collinear overlap pointing the same way counts
        return _cross(q, p, r) == 0 and (p[0] - q[0]) * (r[0] - q[0]) + (p[1] - q[1]) * (r[1] - q[1]) > 0
    d1, d2 = _cross(c, d, a), _cross(c, d, b)
    d3, d4 = _cross(a, b, c), _cross(a, b, d)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return (
        (d1 == 0 and _on_segment(a, c, d))
        or (d2 == 0 and _on_segment(b, c, d))
        or (d3 == 0 and _on_segment(c, a, b))
        or (d4 == 0 and _on_segment(d, a, b))
    )


def path_crossing_free(points) -> bool:
    """True iff no two nonadjacent segments of the polyline intersect."""
    k = len(points) - 1
    if k < 0:
        raise ValueError("empty polyline")
    for i in range(k):
        for j in range(i + 2, k):
            if segments_cross(points[i], points[i + 1], points[j], points[j + 1]):
                return False
    return True


@dataclass(frozen=True)
class OddEvenResult:
    ordered: tuple
    rounds_used: int
    swap_rounds: tuple

    @property
    def swap_bearing(self) -> int:
        return len(self.swap_rounds)


def odd_even_rounds(labels: Sequence[int], endpoints_fixed: bool = True, first_parity: int = 1) -> OddEvenResult:
    """Synchronous odd-even transposition sort.

    Round ``r`` (1-based) compares pairs ``(i, i+1)`` with ``i`` of parity
    ``first_parity`` in odd rounds and the other parity in even rounds. With
    ``endpoints_fixed`` the first and last entries never take part. Stops
    after two consecutive swap-free rounds.
    """
    if len(labels) < 2:
        raise ValueError("need at least two labels")
    seq = list(labels)
    lo, hi = (1, len(seq) - 2) if endpoints_fixed else (0, len(seq) - 1)
    quiet = 0
    rnd = 0
    swap_rounds = []
    while quiet < 2:
        rnd += 1
        start = first_parity if rnd % 2 == 1 else 1 - first_parity
        start = start % 2
        swapped = False
        i = lo + ((start - lo) % 2)
        while i + 1 <= hi:
            if seq[i] > seq[i + 1]:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                swapped = True
            i += 2
        if swapped:
            swap_rounds.append(rnd)
            quiet = 0
        else:
            quiet += 1
    return OddEvenResult(tuple(seq), swap_rounds[-1] if swap_rounds else 0, tuple(swap_rounds))
