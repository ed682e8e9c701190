"""Location-based performance assessment of process maps and route variants.

Distance complements execution time: an edge's speed is its great-circle
length divided by its mean transit duration, and variants rank both by
total distance (the optimal path is the shortest observed one) and by
traffic (case count). All rankings break ties fully, so results are
deterministic for any input order.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

from .discovery import (
    Dimension, DfgEdge, ProcessMap, Variant, _node_positions, path_distance_km, project,
)
from .eventlog import EventLog
from .geo import haversine_km


class UndefinedSpeedError(ValueError):
    """Speed is undefined: missing distance or non-positive duration."""


class NoDistanceError(ValueError):
    """No variant carries a complete total distance."""


@dataclass(frozen=True, slots=True)
class EdgeMetrics:
    distance_km: float | None
    mean_duration_s: float
    speed_kmh: float | None
    frequency: int

    @classmethod
    def from_edge(cls, edge: DfgEdge) -> "EdgeMetrics":
        return cls(edge.distance_km, edge.durations.mean,
                   speed_or_none(edge), edge.frequency)


@dataclass(frozen=True, slots=True)
class PathAssessment:
    variant: Variant
    total_distance_km: float | None
    total_mean_duration_s: float | None
    rank_by_distance: int
    rank_by_traffic: int


@dataclass(frozen=True)
class DistanceAnnotation:
    map: ProcessMap
    missing: tuple[tuple[str, str], ...]


def annotate_distances(pmap: ProcessMap) -> DistanceAnnotation:
    """Attach great-circle distances to every edge whose endpoints are located.

    Edges with an unlocated endpoint keep no distance and are reported.
    Idempotent: distances recompute to the same values.
    """
    edges = {}
    missing = []
    for pair, edge in pmap.edges.items():
        a = pmap.nodes[edge.source].coord
        b = pmap.nodes[edge.target].coord
        if a is None or b is None:
            missing.append(pair)
            edges[pair] = replace(edge, distance_km=None)
        else:
            edges[pair] = replace(edge, distance_km=haversine_km(a, b))
    annotated = replace(pmap, edges=edges)
    return DistanceAnnotation(annotated, tuple(missing))


def speed(edge: DfgEdge) -> float:
    """Edge speed in km/h: distance over mean transit duration."""
    if edge.distance_km is None:
        raise UndefinedSpeedError(f"edge {edge.source}->{edge.target} has no distance")
    if edge.durations.mean <= 0:
        raise UndefinedSpeedError(
            f"edge {edge.source}->{edge.target} has non-positive mean duration")
    return edge.distance_km / (edge.durations.mean / 3600.0)


def speed_or_none(edge: DfgEdge) -> float | None:
    try:
        return speed(edge)
    except UndefinedSpeedError:
        return None


def optimal_path(candidates: list[Variant]) -> Variant:
    """The observed variant with minimal total distance.

    Ties prefer the higher case count, then the lexicographically smaller
    path. Raises NoDistanceError when no candidate has a complete distance.
    """
    with_distance = [v for v in candidates if v.total_distance_km is not None]
    if not with_distance:
        raise NoDistanceError("no variant has a complete total distance")
    return min(with_distance,
               key=lambda v: (v.total_distance_km, -v.case_count, v.path))


def traffic_ranking(candidates: list[Variant], k: int) -> list[Variant]:
    """Top-k variants by case count (ties: shorter distance, then path)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(candidates, key=_traffic_key)
    return ranked[:k]


def _traffic_key(v: Variant):
    dist = v.total_distance_km if v.total_distance_km is not None else float("inf")
    return (-v.case_count, dist, v.path)


def assess(log: EventLog, dim: Dimension) -> list[PathAssessment]:
    """Assess every variant of a log: totals plus both rank columns.

    Results come back in traffic order. Each rank column is a permutation
    of 1..k; variants without a distance rank after all measured ones.
    """
    projected = project(log, dim, collapse_repeats=True)
    positions = _node_positions(projected)
    counts: dict[tuple[str, ...], int] = {}
    transit: dict[tuple[str, ...], list[float]] = {}
    for ptrace in projected:
        if not ptrace.steps:
            continue
        path = ptrace.labels
        counts[path] = counts.get(path, 0) + 1
        total = 0.0
        prev = ptrace.steps[0]
        for cur in ptrace.steps[1:]:
            total += max(0.0, (cur.start - prev.end).total_seconds())
            prev = cur
        transit.setdefault(path, []).append(total)

    items = [
        (Variant(path, counts[path], path_distance_km(path, positions)),
         statistics.fmean(transit[path]))
        for path in counts
    ]
    by_traffic = sorted(items, key=lambda it: _traffic_key(it[0]))
    traffic_rank = {it[0].path: i + 1 for i, it in enumerate(by_traffic)}
    by_distance = sorted(items, key=lambda it: (
        it[0].total_distance_km is None,
        it[0].total_distance_km if it[0].total_distance_km is not None else 0.0,
        -it[0].case_count,
        it[0].path,
    ))
    distance_rank = {it[0].path: i + 1 for i, it in enumerate(by_distance)}

    return [
        PathAssessment(
            variant=v,
            total_distance_km=v.total_distance_km,
            total_mean_duration_s=mean_transit,
            rank_by_distance=distance_rank[v.path],
            rank_by_traffic=traffic_rank[v.path],
        )
        for v, mean_transit in by_traffic
    ]


def assessments_csv(items: list[PathAssessment]) -> str:
    """CSV form with units in the headers."""
    lines = ["path,case_count,total_distance_km,total_mean_duration_s,"
             "rank_by_distance,rank_by_traffic"]
    for a in items:
        path = " -> ".join(a.variant.path)
        if "," in path or '"' in path:
            path = '"' + path.replace('"', '""') + '"'
        dist = "" if a.total_distance_km is None else f"{a.total_distance_km:.3f}"
        dur = "" if a.total_mean_duration_s is None else f"{a.total_mean_duration_s:.0f}"
        lines.append(f"{path},{a.variant.case_count},{dist},{dur},"
                     f"{a.rank_by_distance},{a.rank_by_traffic}")
    return "\n".join(lines) + "\n"
