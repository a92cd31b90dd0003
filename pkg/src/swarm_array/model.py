"""Robots, scenarios, physical parameters and the unit-disk graph."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Point2

MAX_PLACEMENT_ATTEMPTS = 1000


class DisconnectedScenario(RuntimeError):
    """No connected placement was found within the resampling budget."""


@dataclass(frozen=True)
class PhysicalParams:
    robot_radius: float = 0.05
    comm_range: float = 4.5
    v_max: float = 1.0
    tick_rate: float = 60.0

    def __post_init__(self):
        for name in ("robot_radius", "comm_range", "v_max", "tick_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.comm_range > 4 * self.robot_radius:
            raise ValueError("comm_range must exceed four robot radii")

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    @property
    def max_step(self) -> float:
        return self.v_max / self.tick_rate


def default_params() -> PhysicalParams:
    return PhysicalParams()


@dataclass(frozen=True)
class CommGraph:
    adjacency: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.adjacency)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]


def build_comm_graph(positions, comm_range: float) -> CommGraph:
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return CommGraph(())
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    close = d <= comm_range
    np.fill_diagonal(close, False)
    return CommGraph(tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in close))


def is_connected(g: CommGraph) -> bool:
    n = len(g)
    if n == 0:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == n


@dataclass(frozen=True)
class Scenario:
    n: int
    seed: int
    positions: tuple[Point2, ...]
    labels: tuple[int, ...]
    params: PhysicalParams = field(default_factory=default_params)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a scenario needs at least two robots")
        if len(self.positions) != self.n or len(self.labels) != self.n:
            raise ValueError("positions and labels must both have n entries")
        if len(set(self.labels)) != self.n or min(self.labels) < 1:
            raise ValueError("labels must be distinct positive integers")
        object.__setattr__(
            self, "positions", tuple(Point2(float(x), float(y)) for x, y in self.positions)
        )
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if not is_connected(self.graph()):
            raise DisconnectedScenario("communication graph is not connected")

    def graph(self) -> CommGraph:
        return build_comm_graph(self.positions, self.params.comm_range)

    @property
    def min_index(self) -> int:
        return self.labels.index(min(self.labels))

    @property
    def max_index(self) -> int:
        return self.labels.index(max(self.labels))

    def diameter(self) -> float:
        pts = np.asarray(self.positions)
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.hypot(diff[..., 0], diff[..., 1]).max())

    def to_json(self) -> str:
        p = asdict(self.params)
        return json.dumps(
            {
                "n": self.n,
                "seed": self.seed,
                "params": {
                    "radius": p["robot_radius"],
                    "comm_range": p["comm_range"],
                    "v_max": p["v_max"],
                    "tick_rate": p["tick_rate"],
                },
                "positions": [[x, y] for x, y in self.positions],
                "labels": list(self.labels),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> Scenario:
        obj = json.loads(text)
        p = obj["params"]
        params = PhysicalParams(p["radius"], p["comm_range"], p["v_max"], p["tick_rate"])
        return cls(
            n=obj["n"],
            seed=obj["seed"],
            positions=tuple(tuple(xy) for xy in obj["positions"]),
            labels=tuple(obj["labels"]),
            params=params,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> Scenario:
        return cls.from_json(Path(path).read_text())


def generate_scenario(n: int, seed: int, params: PhysicalParams | None = None) -> Scenario:
    """Random placement in the ``0.4 n x 12`` rectangle.

    The minimum label sits at the lower-left corner and the maximum at the
    lower-right corner; everything else is uniform. Placements are
    resampled until the communication graph is connected.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    params = params or default_params()
    width, height = 0.4 * n, 12.0
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(1, n + 1))
    lo, hi = int(np.argmin(labels)), int(np.argmax(labels))
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        pts = np.column_stack([rng.uniform(0, width, n), rng.uniform(0, height, n)])
        pts[lo] = (0.0, 0.0)
        pts[hi] = (width, 0.0)
        if is_connected(build_comm_graph(pts, params.comm_range)):
            return Scenario(
                n=n,
                seed=seed,
                positions=tuple(map(tuple, pts)),
                labels=tuple(int(v) for v in labels),
                params=params,
            )
    raise DisconnectedScenario(
        f"no connected placement for n={n}, seed={seed} after {MAX_PLACEMENT_ATTEMPTS} attempts"
    )


def target_positions(s: Scenario) -> list[Point2]:
    """Final slot of every robot, indexed like ``s.positions``."""
    p_min = s.positions[s.min_index]
    p_max = s.positions[s.max_index]
    rank = {label: i for i, label in enumerate(sorted(s.labels))}
    out = []
    for label in s.labels:
        f = rank[label] / (s.n - 1)
        out.append(Point2(p_min[0] + f * (p_max[0] - p_min[0]), p_min[1] + f * (p_max[1] - p_min[1])))
    return out
