"""Geo-enabled process map discovery from geo-tagged event logs."""

from .discovery import (
    DIM_ACTIVITY, DIM_CITY, DIM_RESOURCE, Dimension, DfgEdge, DfgNode, FilterSpec,
    ProcessMap, Variant, aggregate, discover, filter_endpoints, filter_frequency,
    filter_time, project, variants,
)
from .eventlog import (
    Event, EventLog, SchemaMapping, POSTAL_SCHEMA, Trace, geocode, parse_csv, validate,
    write_csv,
)
from .export import (
    FrameSet, LayerDoc, dynamic_frames, load_evidence_layer, to_dot, to_geojson,
)
from .geo import (
    Coordinate, Gazetteer, Level, Place, ancestor_at_level, haversine_km, load_gazetteer,
)
from .metrics import (
    EdgeMetrics, PathAssessment, annotate_distances, assess, optimal_path, speed,
    traffic_ranking,
)
from .synthlog import NetworkConfig, Route, generate, scale_benchmark_config

__version__ = "0.1.0"

__all__ = [
    "Coordinate", "DfgEdge", "DfgNode", "DIM_ACTIVITY", "DIM_CITY", "DIM_RESOURCE",
    "Dimension", "EdgeMetrics", "Event", "EventLog", "FilterSpec", "FrameSet",
    "Gazetteer", "LayerDoc", "Level", "NetworkConfig", "PathAssessment", "Place",
    "ProcessMap", "Route", "SchemaMapping", "POSTAL_SCHEMA", "Trace", "Variant",
    "aggregate", "ancestor_at_level", "annotate_distances", "assess", "discover",
    "dynamic_frames", "filter_endpoints", "filter_frequency", "filter_time", "generate",
    "geocode", "haversine_km", "load_evidence_layer", "load_gazetteer", "optimal_path",
    "parse_csv", "project", "scale_benchmark_config", "speed", "to_dot", "to_geojson",
    "traffic_ranking", "validate", "variants", "write_csv",
]
