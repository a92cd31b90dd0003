"""Run metrics and the JSON-lines trace stream."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, fields
from typing import IO, NamedTuple

MESSAGE_KINDS = (
    "WaveForward",
    "WaveEcho",
    "LeaderDone",
    "DistUpdate",
    "PathJoin",
    "Offer",
    "Accept",
    "Reject",
    "Ready",
    "Init",
    "Ret",
    "Terminate",
    "Place",
)
PHASES = ("leader", "path", "contract_straighten", "sort")
_BOUNDARY = {"path": 0, "contract_straighten": 1, "sort": 2}


class TraceEvent(NamedTuple):
    tick: int
    kind: str
    robot: int
    detail: dict


@dataclass
class RunMetrics:
    n: int = 0
    seed: int = 0
    ticks_total: int = 0
    ticks_leader: int = 0
    ticks_path: int = 0
    ticks_contract_straighten: int = 0
    ticks_sort: int = 0
    messages_total: int = 0
    messages_by_kind: dict = field(default_factory=lambda: dict.fromkeys(MESSAGE_KINDS, 0))
    messages_by_phase: dict = field(default_factory=lambda: dict.fromkeys(PHASES, 0))
    messages_per_recipient: int = 0
    travel_total: float = 0.0
    travel_max_single_robot: float = 0.0
    waves_used: int = 0
    swaps_performed: int = 0
    D: float = 0.0
    out_of_range_sends: int = 0

    def __post_init__(self):
        self._last_tick = 0
        self._odometer: dict[int, float] = {}
        self._boundary = [0, 0, 0]

    def record(self, event: TraceEvent) -> None:
        tick, kind, robot, detail = event
        if tick < self._last_tick:
            raise AssertionError(f"trace event at tick {tick} after tick {self._last_tick}")
        self._last_tick = tick
        if kind == "move":
            d = detail["d"]
            self.travel_total += d
            odo = self._odometer.get(robot, 0.0) + d
            self._odometer[robot] = odo
            if odo > self.travel_max_single_robot:
                self.travel_max_single_robot = odo
        elif kind == "send":
            self.messages_total += 1
            self.messages_by_kind[detail["msg"]] += 1
            phase = detail["phase"]
            if phase in self.messages_by_phase:
                self.messages_by_phase[phase] += 1
        elif kind == "deliver":
            self.messages_per_recipient += 1
        elif kind == "phase":
            slot = _BOUNDARY.get(detail["phase"])
            if slot is not None and tick > self._boundary[slot]:
                self._boundary[slot] = tick
        elif kind == "wave_start":
            self.waves_used += 1
        elif kind == "swap":
            self.swaps_performed += 1

    def finish(self, ticks_total: int) -> RunMetrics:
        """Close the run: derive per-phase ticks from the recorded boundaries."""
        self.ticks_total = ticks_total
        b_path, b_contract, b_sort = self._boundary
        b_contract = max(b_contract, b_path)
        b_sort = max(b_sort, b_contract)
        self.ticks_leader = b_path
        self.ticks_path = b_contract - b_path
        self.ticks_contract_straighten = b_sort - b_contract
        self.ticks_sort = ticks_total - b_sort
        return self

    def row(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "messages_by_kind":
                out.update({f"messages_{k}": v[k] for k in MESSAGE_KINDS})
            elif f.name == "messages_by_phase":
                out.update({f"messages_phase_{p}": v[p] for p in PHASES})
            else:
                out[f.name] = v
        return out

    @classmethod
    def from_row(cls, row: dict) -> RunMetrics:
        m = cls()
        for f in fields(cls):
            if f.name == "messages_by_kind":
                m.messages_by_kind = {k: int(row[f"messages_{k}"]) for k in MESSAGE_KINDS}
            elif f.name == "messages_by_phase":
                m.messages_by_phase = {p: int(row[f"messages_phase_{p}"]) for p in PHASES}
            else:
                cast = float if f.type in ("float",) else int
                setattr(m, f.name, cast(row[f.name]))
        return m


def csv_header() -> list[str]:
    return list(RunMetrics().row())


def export_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=csv_header(), lineterminator="\n")
    writer.writeheader()
    for m in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in m.row().items()})
    return buf.getvalue()


def read_csv(text: str) -> list[RunMetrics]:
    return [RunMetrics.from_row(r) for r in csv.DictReader(io.StringIO(text))]


class Trace:
    """Fans trace events out to the metrics accumulator and an optional sink.

    With ``keep=True`` events are also retained in memory (tests use this).
    """

    def __init__(self, sink: IO[str] | None = None, keep: bool = False):
        self.sink = sink
        self.keep = keep
        self.events: list[TraceEvent] = []
        self.listeners: list = []
        self._metrics: RunMetrics | None = None

    def attach(self, metrics: RunMetrics) -> None:
        self._metrics = metrics

    def emit(self, tick: int, kind: str, robot: int, detail: dict) -> None:
        ev = TraceEvent(tick, kind, robot, detail)
        if self._metrics is not None:
            self._metrics.record(ev)
        if self.keep:
            self.events.append(ev)
        for fn in self.listeners:
            fn(ev)
        if self.sink is not None:
            self.sink.write(to_jsonl(ev))


def to_jsonl(ev: TraceEvent) -> str:
    obj = {"tick": ev.tick, "kind": ev.kind, "robot": ev.robot}
    obj.update(ev.detail)
    return json.dumps(obj, separators=(",", ":")) + "\n"
