"""Directly-follows process map discovery, filters, and hierarchy aggregation.

A trace is projected onto a dimension (activity, city, resource, or a
custom source column); the process map counts how often one projected
label immediately follows another. With collapse_repeats, maximal runs of
identical consecutive labels merge into one step spanning the run, so a
parcel's check-in/check-out inside one city becomes a single visit and the
city map carries no self-loops.

Edge durations run from the source step's exit (last event of its run) to
the target step's start, so waiting inside a hub is not counted as travel.
Negative gaps (clock skew) clamp to zero and increment a quality counter.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Callable, Iterable

from .eventlog import Event, EventLog, Trace, UNKNOWN_LABEL, SchemaError
from .geo import Coordinate, Gazetteer, GeoError, Level, haversine_km


class AggregationError(ValueError):
    """Unresolvable places in strict mode."""


@dataclass(frozen=True, slots=True)
class Dimension:
    """The log column whose values become process-map nodes."""

    kind: str
    column: str | None = None

    _KINDS = ("activity", "city", "resource", "custom")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown dimension kind {self.kind!r}")
        if self.kind == "custom" and not self.column:
            raise ValueError("custom dimension requires a column name")

    def __str__(self) -> str:
        return f"custom:{self.column}" if self.kind == "custom" else self.kind

    @classmethod
    def parse(cls, text: str) -> "Dimension":
        text = text.strip()
        if text.startswith("custom:"):
            return cls("custom", text.split(":", 1)[1])
        if text in ("activity", "city", "resource"):
            return cls(text)
        # a bare non-keyword name refers to a source column
        return cls("custom", text)

    @classmethod
    def custom(cls, column: str) -> "Dimension":
        return cls("custom", column)


DIM_ACTIVITY = Dimension("activity")
DIM_CITY = Dimension("city")
DIM_RESOURCE = Dimension("resource")


@dataclass(frozen=True, slots=True)
class Step:
    """One projected step: a maximal run of same-label events."""

    label: str
    start: datetime
    end: datetime
    coord: Coordinate | None


@dataclass(frozen=True, slots=True)
class ProjectedTrace:
    case_id: str
    steps: tuple[Step, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.steps)


@dataclass(frozen=True, slots=True)
class DurationStats:
    min: float
    max: float
    mean: float
    median: float


@dataclass(frozen=True, slots=True)
class DfgNode:
    label: str
    coord: Coordinate | None
    visit_count: int
    case_count: int


@dataclass(frozen=True, slots=True)
class DfgEdge:
    source: str
    target: str
    frequency: int
    case_frequency: int
    durations: DurationStats
    distance_km: float | None = None


@dataclass(frozen=True)
class ProcessMap:
    nodes: dict[str, DfgNode]
    edges: dict[tuple[str, str], DfgEdge]
    dimension: Dimension
    level: Level | None
    collapse_repeats: bool
    provenance: tuple[str, ...]
    trace_count: int
    negative_duration_count: int = 0
    unresolved_places: tuple[str, ...] = ()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def to_dict(self) -> dict:
        """Stable structured form (sorted nodes/edges) for golden files."""
        return {
            "dimension": str(self.dimension),
            "level": self.level.value if self.level else None,
            "collapse_repeats": self.collapse_repeats,
            "provenance": list(self.provenance),
            "trace_count": self.trace_count,
            "negative_duration_count": self.negative_duration_count,
            "unresolved_places": list(self.unresolved_places),
            "nodes": [
                {
                    "label": n.label,
                    "lat": n.coord.lat if n.coord else None,
                    "lon": n.coord.lon if n.coord else None,
                    "visit_count": n.visit_count,
                    "case_count": n.case_count,
                }
                for n in self.nodes.values()
            ],
            "edges": [
                {
                    "source": e.source,
                    "target": e.target,
                    "frequency": e.frequency,
                    "case_frequency": e.case_frequency,
                    "duration_s": {
                        "min": e.durations.min,
                        "max": e.durations.max,
                        "mean": e.durations.mean,
                        "median": e.durations.median,
                    },
                    "distance_km": e.distance_km,
                }
                for e in self.edges.values()
            ],
        }


@dataclass(frozen=True, slots=True)
class Variant:
    path: tuple[str, ...]
    case_count: int
    total_distance_km: float | None


@dataclass(frozen=True, slots=True)
class FilterSpec:
    source: str | None = None
    destination: str | None = None
    time_window: tuple[datetime, datetime] | None = None
    min_edge_frequency: int = 0

    def __post_init__(self) -> None:
        if self.time_window is not None:
            start, end = self.time_window
            if start > end:
                raise ValueError("time window start is after end")
        if self.min_edge_frequency < 0:
            raise ValueError("min_edge_frequency must be non-negative")


Labeler = Callable[[Event], str]


def labeler_for(log: EventLog, dim: Dimension) -> Labeler:
    """Build the event→label function for a dimension.

    Missing values map to the "<unknown>" sentinel so conservation
    invariants hold. A custom column may name any source column (mapped
    role columns included); an absent column raises SchemaError.
    """
    if dim.kind == "activity":
        return lambda ev: ev.activity or UNKNOWN_LABEL
    if dim.kind == "city":
        return lambda ev: ev.city or UNKNOWN_LABEL
    if dim.kind == "resource":
        return lambda ev: ev.resource or UNKNOWN_LABEL
    col = dim.column
    schema = log.schema
    role_getters = {
        schema.case_id_col: lambda ev: ev.case_id,
        schema.event_id_col: lambda ev: ev.event_id,
        schema.activity_col: lambda ev: ev.activity,
        schema.resource_col: lambda ev: ev.resource,
        schema.city_col: lambda ev: ev.city,
    }
    role_getters.pop(None, None)
    if col in role_getters:
        getter = role_getters[col]
        return lambda ev: getter(ev) or UNKNOWN_LABEL
    extra_columns = log.source_meta.extra_columns
    if col in extra_columns:
        idx = extra_columns.index(col)
        def from_extras(ev: Event) -> str:
            if ev.extras is None or idx >= len(ev.extras):
                return UNKNOWN_LABEL
            return ev.extras[idx].strip() or UNKNOWN_LABEL
        return from_extras
    raise SchemaError(f"dimension column {col!r} not present in the log schema")


def _project_trace(trace: Trace, labelfn: Labeler, collapse: bool) -> ProjectedTrace:
    steps: list[Step] = []
    events = trace.events
    run_label: str | None = None
    run_start: datetime | None = None
    run_end: datetime | None = None
    run_coord: Coordinate | None = None
    for ev in events:
        label = labelfn(ev)
        if collapse and label == run_label:
            run_end = ev.timestamp
            if run_coord is None:
                run_coord = ev.location
            continue
        if run_label is not None:
            steps.append(Step(run_label, run_start, run_end, run_coord))
        run_label = label
        run_start = ev.timestamp
        run_end = ev.timestamp
        run_coord = ev.location
    if run_label is not None:
        steps.append(Step(run_label, run_start, run_end, run_coord))
    return ProjectedTrace(trace.case_id, tuple(steps))


def project(log: EventLog, dim: Dimension, collapse_repeats: bool = True) -> list[ProjectedTrace]:
    """Map every trace to its ordered label sequence with step times/coords."""
    labelfn = labeler_for(log, dim)
    return [_project_trace(t, labelfn, collapse_repeats) for t in log.traces.values()]


def _node_positions(projected: Iterable[ProjectedTrace]) -> dict[str, Coordinate]:
    """Per-label coordinate: centroid of step-entry coordinates.

    Each step contributes the coordinate of its first located event, so
    labels visited more often weigh in proportionally (visit-weighted).
    """
    sums: dict[str, list[float]] = {}
    for ptrace in projected:
        for step in ptrace.steps:
            c = step.coord
            if c is None:
                continue
            acc = sums.get(step.label)
            if acc is None:
                sums[step.label] = [c.lat, c.lon, 1.0]
            else:
                acc[0] += c.lat
                acc[1] += c.lon
                acc[2] += 1.0
    return {
        label: Coordinate(lat / n, lon / n)
        for label, (lat, lon, n) in sums.items()
    }


def _discover_projected(projected: list[ProjectedTrace], dim: Dimension,
                        collapse: bool, *, level: Level | None = None,
                        provenance: tuple[str, ...] = (),
                        unresolved: tuple[str, ...] = ()) -> ProcessMap:
    visits: dict[str, int] = {}
    node_cases: dict[str, int] = {}
    freq: dict[tuple[str, str], int] = {}
    edge_cases: dict[tuple[str, str], int] = {}
    durations: dict[tuple[str, str], list[float]] = {}
    negatives = 0

    for ptrace in projected:
        steps = ptrace.steps
        if not steps:
            continue
        case_labels = set()
        for step in steps:
            label = step.label
            visits[label] = visits.get(label, 0) + 1
            case_labels.add(label)
        for label in case_labels:
            node_cases[label] = node_cases.get(label, 0) + 1
        case_pairs = set()
        prev = steps[0]
        for cur in steps[1:]:
            pair = (prev.label, cur.label)
            freq[pair] = freq.get(pair, 0) + 1
            gap = (cur.start - prev.end).total_seconds()
            if gap < 0:
                negatives += 1
                gap = 0.0
            bucket = durations.get(pair)
            if bucket is None:
                durations[pair] = [gap]
            else:
                bucket.append(gap)
            case_pairs.add(pair)
            prev = cur
        for pair in case_pairs:
            edge_cases[pair] = edge_cases.get(pair, 0) + 1

    positions = _node_positions(projected)
    nodes = {
        label: DfgNode(label, positions.get(label), visits[label], node_cases[label])
        for label in sorted(visits)
    }
    edges = {}
    for pair in sorted(freq):
        durs = durations[pair]
        stats = DurationStats(min(durs), max(durs), statistics.fmean(durs),
                              float(statistics.median(durs)))
        edges[pair] = DfgEdge(pair[0], pair[1], freq[pair], edge_cases[pair], stats)
    return ProcessMap(
        nodes=nodes, edges=edges, dimension=dim, level=level,
        collapse_repeats=collapse, provenance=provenance,
        trace_count=sum(1 for p in projected if p.steps),
        negative_duration_count=negatives,
        unresolved_places=unresolved,
    )


def discover(log: EventLog, dim: Dimension, collapse_repeats: bool = True) -> ProcessMap:
    """Discover the directly-follows process map of a log.

    Deterministic: nodes and edges are ordered lexicographically, so the
    serialized map is byte-identical across runs and row permutations.
    An empty log yields an empty map.
    """
    projected = project(log, dim, collapse_repeats)
    return _discover_projected(projected, dim, collapse_repeats)


# --- filters ---------------------------------------------------------------


def _filter_endpoints_labeled(log: EventLog, labelfn: Labeler,
                              source: str, destination: str) -> EventLog:
    # endpoints survive run-collapsing, so first/last event labels suffice
    kept = [
        t for t in log.traces.values()
        if t.events and labelfn(t.events[0]) == source and labelfn(t.events[-1]) == destination
    ]
    return log.with_traces(kept)


def filter_endpoints(log: EventLog, dim: Dimension, source: str, destination: str) -> EventLog:
    """Retain traces whose projected path starts at source and ends at destination."""
    if not source or not destination:
        raise ValueError("source and destination labels must be non-empty")
    return _filter_endpoints_labeled(log, labeler_for(log, dim), source, destination)


def filter_time(log: EventLog, window: tuple[datetime, datetime]) -> EventLog:
    """Retain traces whose first event falls in [start, end); traces stay intact."""
    start, end = window
    if start > end:
        raise ValueError("time window start is after end")
    kept = [t for t in log.traces.values()
            if t.events and start <= t.events[0].timestamp < end]
    return log.with_traces(kept)


def filter_frequency(pmap: ProcessMap, min_freq: int) -> ProcessMap:
    """Drop edges below min_freq, then nodes left without incident edges."""
    if min_freq < 0:
        raise ValueError("min_freq must be non-negative")
    edges = {pair: e for pair, e in pmap.edges.items() if e.frequency >= min_freq}
    if len(pmap.nodes) == 1:
        nodes = dict(pmap.nodes)
    else:
        incident = {lbl for pair in edges for lbl in pair}
        nodes = {lbl: n for lbl, n in pmap.nodes.items() if lbl in incident}
    return replace(pmap, nodes=nodes, edges=edges,
                   provenance=pmap.provenance + (f"min_freq={min_freq}",))


# --- hierarchy aggregation ---------------------------------------------------


def _aggregate_labeler(log: EventLog, gazetteer: Gazetteer,
                       level: Level) -> tuple[Labeler, set[str]]:
    """Relabel events to their ancestor place at the requested level.

    An event's place is its resource when the gazetteer knows it as an
    office, else its city. Events whose place cannot be resolved at the
    level map to "<unknown>" and are collected for the report.
    """
    unresolved: set[str] = set()
    cache: dict[tuple[str, str], str] = {}

    def label(ev: Event) -> str:
        key = (ev.resource, ev.city)
        hit = cache.get(key)
        if hit is not None:
            return hit
        place = gazetteer.lookup(ev.resource, Level.OFFICE) if ev.resource else None
        if place is None and ev.city:
            place = gazetteer.lookup(ev.city, Level.CITY)
        if place is None or place.level.rank > level.rank:
            unresolved.add(ev.resource or ev.city or "")
            result = UNKNOWN_LABEL
        else:
            try:
                result = gazetteer.ancestor_at_level(place.id, level).name
            except GeoError:
                unresolved.add(place.name)
                result = UNKNOWN_LABEL
        cache[key] = result
        return result

    return label, unresolved


def aggregate(log: EventLog, gazetteer: Gazetteer, level: Level,
              collapse_repeats: bool = True, *, strict: bool = False) -> ProcessMap:
    """Discover the map with every event relabeled to its place at a level."""
    labelfn, unresolved = _aggregate_labeler(log, gazetteer, level)
    projected = [_project_trace(t, labelfn, collapse_repeats) for t in log.traces.values()]
    if strict and unresolved:
        raise AggregationError(
            f"places unresolvable at level {level.value}: {sorted(unresolved)}")
    return _discover_projected(
        projected, Dimension("custom", f"place:{level.value}"),
        collapse_repeats, level=level,
        provenance=(f"aggregate:{level.value}",),
        unresolved=tuple(sorted(unresolved)),
    )


# --- variants ----------------------------------------------------------------


def variants(log: EventLog, dim: Dimension) -> list[Variant]:
    """Distinct collapsed paths with case counts and total path length.

    Sorted by case count descending, then lexicographic path. Total
    distance sums consecutive-pair great-circle distances over the node
    positions and is omitted when any node on the path lacks one.
    """
    projected = project(log, dim, collapse_repeats=True)
    positions = _node_positions(projected)
    counts: dict[tuple[str, ...], int] = {}
    for ptrace in projected:
        if not ptrace.steps:
            continue
        path = ptrace.labels
        counts[path] = counts.get(path, 0) + 1
    result = []
    for path in sorted(counts, key=lambda p: (-counts[p], p)):
        result.append(Variant(path, counts[path], path_distance_km(path, positions)))
    return result


def path_distance_km(path: tuple[str, ...],
                     positions: dict[str, Coordinate]) -> float | None:
    if any(label not in positions for label in path):
        return None
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += haversine_km(positions[a], positions[b])
    return total
