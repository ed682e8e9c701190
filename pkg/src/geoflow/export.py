"""Render process maps as GeoJSON layers, DOT graphs, and time-binned frames.

GeoJSON follows RFC 7946: FeatureCollection root, WGS84, positions
longitude-first. Numeric properties are emitted at fixed precision
(coordinates 8 decimals, kilometers 3, seconds integer) so identical maps
serialize byte-identically.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Iterable

from .discovery import Dimension, ProcessMap, discover, filter_time
from .eventlog import EventLog
from .metrics import speed_or_none


class GeoJsonError(ValueError):
    """Malformed or out-of-range GeoJSON."""


class LayerKind(str, Enum):
    EVENTS_NODES = "events_nodes"
    EVENTS_EDGES = "events_edges"
    EVIDENCE = "evidence"


@dataclass(frozen=True)
class LayerDoc:
    name: str
    kind: LayerKind
    features: tuple[dict, ...]

    @property
    def feature_count(self) -> int:
        return len(self.features)

    def feature_collection(self) -> dict:
        return {"type": "FeatureCollection", "features": list(self.features)}

    def to_json(self) -> str:
        return dumps_canonical(self.feature_collection())


@dataclass(frozen=True)
class GeoJsonLayers:
    nodes: LayerDoc
    edges: LayerDoc
    skipped_nodes: tuple[str, ...]
    skipped_edges: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Frame:
    start: datetime
    end: datetime
    map: ProcessMap


@dataclass(frozen=True)
class FrameSet:
    bin_width_s: int
    frames: tuple[Frame, ...]


def dumps_canonical(obj) -> str:
    """Compact, deterministic JSON (dicts are built in fixed key order)."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _round_coord(x: float) -> float:
    return round(x, 8)


def _round_km(x: float | None) -> float | None:
    return None if x is None else round(x, 3)


def width_hints(frequencies: Iterable[int]) -> dict[int, float]:
    """Map each frequency to a stroke-width hint in [1, 10].

    Linear in frequency between the observed extremes; a constant 5 when
    all frequencies are equal. Monotone non-decreasing by construction.
    """
    freqs = sorted(set(frequencies))
    if not freqs:
        return {}
    lo, hi = freqs[0], freqs[-1]
    if lo == hi:
        return {lo: 5.0}
    return {f: round(1.0 + 9.0 * (f - lo) / (hi - lo), 3) for f in freqs}


def to_geojson(pmap: ProcessMap, layer_prefix: str = "events") -> GeoJsonLayers:
    """Render a map as two layers: node Points and edge LineStrings.

    Nodes without coordinates (and edges touching them) are skipped and
    reported. Self-loop edges become Point features tagged self_loop so
    clients can draw a circular marker instead of a degenerate line.
    """
    nodes_name = f"{layer_prefix}_nodes"
    edges_name = f"{layer_prefix}_edges"
    node_features = []
    skipped_nodes = []
    for node in pmap.nodes.values():
        if node.coord is None:
            skipped_nodes.append(node.label)
            continue
        node_features.append({
            "type": "Feature",
            "geometry": {
                "type": "Point",
                "coordinates": [_round_coord(node.coord.lon), _round_coord(node.coord.lat)],
            },
            "properties": {
                "layer": nodes_name,
                "label": node.label,
                "visit_count": node.visit_count,
                "case_count": node.case_count,
            },
        })

    hints = width_hints(e.frequency for e in pmap.edges.values())
    edge_features = []
    skipped_edges = []
    for pair, edge in pmap.edges.items():
        a = pmap.nodes[edge.source].coord
        b = pmap.nodes[edge.target].coord
        if a is None or b is None:
            skipped_edges.append(pair)
            continue
        if edge.source == edge.target:
            geometry = {
                "type": "Point",
                "coordinates": [_round_coord(a.lon), _round_coord(a.lat)],
            }
        else:
            geometry = {
                "type": "LineString",
                "coordinates": [
                    [_round_coord(a.lon), _round_coord(a.lat)],
                    [_round_coord(b.lon), _round_coord(b.lat)],
                ],
            }
        properties = {
            "layer": edges_name,
            "source": edge.source,
            "target": edge.target,
            "frequency": edge.frequency,
            "case_frequency": edge.case_frequency,
            "mean_duration_s": round(edge.durations.mean),
            "distance_km": _round_km(edge.distance_km),
            "speed_kmh": _round_km(speed_or_none(edge)),
            "width_hint": hints[edge.frequency],
        }
        if edge.source == edge.target:
            properties["self_loop"] = True
        edge_features.append({"type": "Feature", "geometry": geometry,
                              "properties": properties})

    return GeoJsonLayers(
        nodes=LayerDoc(nodes_name, LayerKind.EVENTS_NODES, tuple(node_features)),
        edges=LayerDoc(edges_name, LayerKind.EVENTS_EDGES, tuple(edge_features)),
        skipped_nodes=tuple(skipped_nodes),
        skipped_edges=tuple(skipped_edges),
    )


# --- DOT ---------------------------------------------------------------------


def _dot_quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(pmap: ProcessMap) -> str:
    """DOT text with lexicographically ordered node and edge statements."""
    lines = ["digraph process_map {"]
    for label in pmap.nodes:
        lines.append(f"    {_dot_quote(label)};")
    for edge in pmap.edges.values():
        label = f"{edge.frequency} / {round(edge.durations.mean)}s"
        lines.append(
            f"    {_dot_quote(edge.source)} -> {_dot_quote(edge.target)} "
            f"[label={_dot_quote(label)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- dynamic frames -----------------------------------------------------------


def dynamic_frames(log: EventLog, dim: Dimension, bin_width_s: int,
                   collapse_repeats: bool = True) -> FrameSet:
    """Partition the log into contiguous time windows and discover each.

    Windows start at the earliest first-event timestamp and advance by
    bin_width_s; a trace belongs to the window containing its first event.
    Together the windows cover the span exactly, with no gaps or overlaps.
    """
    if bin_width_s <= 0:
        raise ValueError("bin_width_s must be positive")
    starts = [t.events[0].timestamp for t in log.traces.values() if t.events]
    if not starts:
        return FrameSet(bin_width_s, ())
    lo, hi = min(starts), max(starts)
    span = (hi - lo).total_seconds()
    count = int(span // bin_width_s) + 1
    frames = []
    for i in range(count):
        start = lo + timedelta(seconds=i * bin_width_s)
        end = lo + timedelta(seconds=(i + 1) * bin_width_s)
        window_log = filter_time(log, (start, end))
        frames.append(Frame(start, end, discover(window_log, dim, collapse_repeats)))
    return FrameSet(bin_width_s, tuple(frames))


# --- evidence layers ----------------------------------------------------------

_GEOMETRY_TYPES = ("Point", "LineString", "MultiLineString")


def _check_position(pos, where: str) -> None:
    if (not isinstance(pos, (list, tuple)) or not 2 <= len(pos) <= 3
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in pos)):
        raise GeoJsonError(f"{where}: position must be [lon, lat] numbers")
    lon, lat = pos[0], pos[1]
    if not -180.0 <= lon <= 180.0:
        raise GeoJsonError(f"{where}: longitude {lon} outside [-180, 180]")
    if not -90.0 <= lat <= 90.0:
        raise GeoJsonError(f"{where}: latitude {lat} outside [-90, 90]")


def validate_geojson(doc: dict, geometry_types: tuple[str, ...] = _GEOMETRY_TYPES) -> None:
    """Structural RFC 7946 check: collection shape, types, position ranges."""
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoJsonError("root must be a FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise GeoJsonError("features must be a list")
    for i, feature in enumerate(features):
        where = f"features[{i}]"
        if not isinstance(feature, dict) or feature.get("type") != "Feature":
            raise GeoJsonError(f"{where}: not a Feature")
        geometry = feature.get("geometry")
        if geometry is None:
            continue
        gtype = geometry.get("type") if isinstance(geometry, dict) else None
        if gtype not in geometry_types:
            raise GeoJsonError(f"{where}: geometry type {gtype!r} not in {geometry_types}")
        coords = geometry.get("coordinates")
        if gtype == "Point":
            _check_position(coords, where)
        elif gtype == "LineString":
            if not isinstance(coords, list) or len(coords) < 2:
                raise GeoJsonError(f"{where}: LineString needs at least two positions")
            for pos in coords:
                _check_position(pos, where)
        elif gtype == "MultiLineString":
            if not isinstance(coords, list):
                raise GeoJsonError(f"{where}: MultiLineString needs a list of lines")
            for line in coords:
                if not isinstance(line, list) or len(line) < 2:
                    raise GeoJsonError(f"{where}: each line needs at least two positions")
                for pos in line:
                    _check_position(pos, where)


def _normalize_positions(geometry: dict) -> dict:
    gtype = geometry["type"]
    coords = geometry["coordinates"]
    if gtype == "Point":
        coords = [_round_coord(coords[0]), _round_coord(coords[1])]
    elif gtype == "LineString":
        coords = [[_round_coord(p[0]), _round_coord(p[1])] for p in coords]
    else:
        coords = [[[_round_coord(p[0]), _round_coord(p[1])] for p in line]
                  for line in coords]
    return {"type": gtype, "coordinates": coords}


def load_evidence_layer(path: str | Path, name: str) -> LayerDoc:
    """Load and validate an external GeoJSON layer (roads, railways, ...)."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GeoJsonError(f"{path.name}: invalid JSON: {exc}") from None
    try:
        validate_geojson(doc)
    except GeoJsonError as exc:
        raise GeoJsonError(f"{path.name}: {exc}") from None
    features = []
    for feature in doc["features"]:
        properties = dict(feature.get("properties") or {})
        properties["layer"] = name
        normalized = {
            "type": "Feature",
            "geometry": _normalize_positions(feature["geometry"])
            if feature.get("geometry") else None,
            "properties": properties,
        }
        features.append(normalized)
    return LayerDoc(name, LayerKind.EVIDENCE, tuple(features))
