"""Shared filter/discovery pipeline and canonical JSON documents.

The CLI and the HTTP server both come through here, so identical
parameters produce byte-identical artifacts. Filters apply in one fixed,
documented order:

    time window -> endpoints -> aggregate/project -> discover
    -> min-frequency -> distance annotation -> GeoJSON

When a hierarchy level is requested, endpoint labels are matched at that
level (a filter from one province to another), using the same relabeling
the aggregation applies.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .discovery import (
    DIM_CITY, Dimension, ProcessMap, _aggregate_labeler, _filter_endpoints_labeled,
    aggregate, discover, filter_frequency, filter_time,
)
from .eventlog import EventLog
from .export import GeoJsonLayers, dumps_canonical, dynamic_frames, to_geojson
from .geo import Gazetteer, Level
from .metrics import PathAssessment, annotate_distances, assess
from .discovery import filter_endpoints as _filter_endpoints_dim


class QueryError(ValueError):
    """Invalid or inconsistent query parameters."""


class UnresolvableLevelError(QueryError):
    """The gazetteer cannot support the requested hierarchy level."""


@dataclass(frozen=True)
class MapQuery:
    dimension: Dimension = DIM_CITY
    level: Level | None = None
    collapse: bool = True
    source: str | None = None
    destination: str | None = None
    window: tuple[datetime, datetime] | None = None
    min_freq: int = 0

    def __post_init__(self) -> None:
        if (self.source is None) != (self.destination is None):
            raise QueryError("source and destination must be given together")
        if self.window and self.window[0] > self.window[1]:
            raise QueryError("'from' must not be after 'to'")
        if self.min_freq < 0:
            raise QueryError("min_freq must be non-negative")


def parse_instant(text: str) -> datetime:
    """Parse an ISO-8601 instant; aware values are converted to UTC."""
    try:
        value = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    except ValueError:
        raise QueryError(f"invalid timestamp {text!r} (expected ISO 8601)") from None
    if value.tzinfo is not None:
        value = value.astimezone(timezone.utc).replace(tzinfo=None)
    return value


def iso_utc(value: datetime) -> str:
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def query_from_params(*, dimension: str | None = None, level: str | None = None,
                      collapse: str | bool | None = None, source: str | None = None,
                      destination: str | None = None, time_from: str | None = None,
                      time_to: str | None = None, min_freq: str | int | None = None,
                      ) -> MapQuery:
    try:
        dim = Dimension.parse(dimension) if dimension else DIM_CITY
    except ValueError as exc:
        raise QueryError(str(exc)) from None
    lvl = None
    if level:
        try:
            lvl = Level.parse(level)
        except ValueError as exc:
            raise QueryError(str(exc)) from None
    if collapse is None:
        collapsed = True
    elif isinstance(collapse, bool):
        collapsed = collapse
    elif collapse.lower() in ("true", "1", "yes"):
        collapsed = True
    elif collapse.lower() in ("false", "0", "no"):
        collapsed = False
    else:
        raise QueryError(f"invalid collapse flag {collapse!r}")
    window = None
    if time_from or time_to:
        if not (time_from and time_to):
            raise QueryError("'from' and 'to' must be given together")
        window = (parse_instant(time_from), parse_instant(time_to))
    freq = 0
    if min_freq not in (None, ""):
        try:
            freq = int(min_freq)
        except (TypeError, ValueError):
            raise QueryError(f"invalid min_freq {min_freq!r}") from None
    return MapQuery(dimension=dim, level=lvl, collapse=collapsed, source=source or None,
                    destination=destination or None, window=window, min_freq=freq)


def apply_filters(log: EventLog, query: MapQuery,
                  gazetteer: Gazetteer | None) -> EventLog:
    """Time window then endpoints, matching labels at the effective level."""
    work = log
    if query.window is not None:
        work = filter_time(work, query.window)
    if query.source is not None and query.destination is not None:
        if query.level is not None:
            if gazetteer is None:
                raise QueryError("a hierarchy level requires a gazetteer")
            labelfn, _ = _aggregate_labeler(work, gazetteer, query.level)
            work = _filter_endpoints_labeled(work, labelfn, query.source, query.destination)
        else:
            work = _filter_endpoints_dim(work, query.dimension, query.source, query.destination)
    return work


def build_map(log: EventLog, query: MapQuery,
              gazetteer: Gazetteer | None = None) -> ProcessMap:
    """Run the full pipeline up to distance annotation."""
    work = apply_filters(log, query, gazetteer)
    if query.level is not None:
        if gazetteer is None:
            raise QueryError("a hierarchy level requires a gazetteer")
        if not gazetteer.has_level(query.level):
            raise UnresolvableLevelError(
                f"gazetteer has no places at level {query.level.value}")
        pmap = aggregate(work, gazetteer, query.level, query.collapse)
    else:
        pmap = discover(work, query.dimension, query.collapse)
    chain = []
    if query.window is not None:
        chain.append(f"time={iso_utc(query.window[0])}..{iso_utc(query.window[1])}")
    if query.source is not None:
        chain.append(f"endpoints={query.source}->{query.destination}")
    pmap = replace(pmap, provenance=tuple(chain) + pmap.provenance)
    if query.min_freq > 0:
        pmap = filter_frequency(pmap, query.min_freq)
    return annotate_distances(pmap).map


def map_summary(pmap: ProcessMap, layers: GeoJsonLayers, query: MapQuery) -> dict:
    return {
        "dimension": str(query.dimension),
        "level": query.level.value if query.level else None,
        "collapse_repeats": query.collapse,
        "filters": {
            "from": iso_utc(query.window[0]) if query.window else None,
            "to": iso_utc(query.window[1]) if query.window else None,
            "source": query.source,
            "destination": query.destination,
            "min_edge_frequency": query.min_freq,
        },
        "trace_count": pmap.trace_count,
        "node_count": layers.nodes.feature_count,
        "edge_count": layers.edges.feature_count,
        "skipped_nodes": list(layers.skipped_nodes),
        "skipped_edges": [f"{s}->{t}" for s, t in layers.skipped_edges],
        "unresolved_places": list(pmap.unresolved_places),
        "negative_duration_count": pmap.negative_duration_count,
        "provenance": list(pmap.provenance),
    }


def map_document(log: EventLog, query: MapQuery,
                 gazetteer: Gazetteer | None = None) -> dict:
    pmap = build_map(log, query, gazetteer)
    layers = to_geojson(pmap)
    return {
        "nodes": layers.nodes.feature_collection(),
        "edges": layers.edges.feature_collection(),
        "summary": map_summary(pmap, layers, query),
    }


def map_document_json(log: EventLog, query: MapQuery,
                      gazetteer: Gazetteer | None = None) -> str:
    return dumps_canonical(map_document(log, query, gazetteer))


def _assessment_dict(a: PathAssessment) -> dict:
    return {
        "path": list(a.variant.path),
        "case_count": a.variant.case_count,
        "total_distance_km": round(a.total_distance_km, 3)
        if a.total_distance_km is not None else None,
        "total_mean_duration_s": round(a.total_mean_duration_s)
        if a.total_mean_duration_s is not None else None,
        "rank_by_distance": a.rank_by_distance,
        "rank_by_traffic": a.rank_by_traffic,
    }


def variants_document(log: EventLog, dimension: Dimension,
                      source: str | None = None, destination: str | None = None) -> dict:
    if (source is None) != (destination is None):
        raise QueryError("source and destination must be given together")
    work = log
    if source is not None and destination is not None:
        work = _filter_endpoints_dim(work, dimension, source, destination)
    assessments = assess(work, dimension)
    return {
        "dimension": str(dimension),
        "filters": {"source": source, "destination": destination},
        "variant_count": len(assessments),
        "variants": [_assessment_dict(a) for a in assessments],
    }


def variants_document_json(log: EventLog, dimension: Dimension,
                           source: str | None = None,
                           destination: str | None = None) -> str:
    return dumps_canonical(variants_document(log, dimension, source, destination))


def frames_document(log: EventLog, dimension: Dimension, bin_width_s: int,
                    collapse: bool = True) -> dict:
    frameset = dynamic_frames(log, dimension, bin_width_s, collapse)
    frames = []
    for frame in frameset.frames:
        annotated = annotate_distances(frame.map).map
        layers = to_geojson(annotated)
        frames.append({
            "window": {"start": iso_utc(frame.start), "end": iso_utc(frame.end)},
            "trace_count": frame.map.trace_count,
            "nodes": layers.nodes.feature_collection(),
            "edges": layers.edges.feature_collection(),
        })
    return {
        "dimension": str(dimension),
        "collapse_repeats": collapse,
        "bin_width_s": bin_width_s,
        "frame_count": len(frames),
        "frames": frames,
    }


def frames_document_json(log: EventLog, dimension: Dimension, bin_width_s: int,
                         collapse: bool = True) -> str:
    return dumps_canonical(frames_document(log, dimension, bin_width_s, collapse))
