"""Independent brute-force implementations used as test oracles.

Deliberately written with different machinery than the package (groupby
runs, Counter tallies, the atan2 great-circle form) so agreement is
meaningful.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from datetime import datetime, timedelta
from itertools import groupby

from geoflow.eventlog import Event, EventLog
from geoflow.geo import Coordinate

EARTH_RADIUS_KM = 6371.0


def haversine_oracle(a: Coordinate, b: Coordinate) -> float:
    """Great-circle distance via the atan2 (spherical Vincenty) form."""
    lat1, lon1 = math.radians(a.lat), math.radians(a.lon)
    lat2, lon2 = math.radians(b.lat), math.radians(b.lon)
    dlon = lon2 - lon1
    y = math.hypot(
        math.cos(lat2) * math.sin(dlon),
        math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon),
    )
    x = math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(dlon)
    return EARTH_RADIUS_KM * math.atan2(y, x)


def label_of(ev: Event, dimension: str) -> str:
    value = {"activity": ev.activity, "city": ev.city, "resource": ev.resource}[dimension]
    return value or "<unknown>"


def brute_steps(events, dimension: str, collapse: bool):
    """Runs of identical labels as (label, start, end, entry-coord) tuples."""
    labeled = [(label_of(ev, dimension), ev) for ev in events]
    if collapse:
        runs = [(lbl, [ev for _, ev in grp]) for lbl, grp in groupby(labeled, key=lambda p: p[0])]
    else:
        runs = [(lbl, [ev]) for lbl, ev in labeled]
    steps = []
    for lbl, evs in runs:
        coord = next((e.location for e in evs if e.location is not None), None)
        steps.append((lbl, evs[0].timestamp, evs[-1].timestamp, coord))
    return steps


def brute_paths(log: EventLog, dimension: str, collapse: bool) -> dict[str, tuple[str, ...]]:
    return {
        case_id: tuple(s[0] for s in brute_steps(t.events, dimension, collapse))
        for case_id, t in log.traces.items()
    }


def brute_edge_frequencies(log: EventLog, dimension: str, collapse: bool) -> Counter:
    pairs: Counter = Counter()
    for path in brute_paths(log, dimension, collapse).values():
        pairs.update(zip(path, path[1:]))
    return pairs


def brute_edge_case_frequencies(log: EventLog, dimension: str, collapse: bool) -> Counter:
    cases: Counter = Counter()
    for path in brute_paths(log, dimension, collapse).values():
        cases.update(set(zip(path, path[1:])))
    return cases


def brute_node_counts(log: EventLog, dimension: str, collapse: bool) -> tuple[Counter, Counter]:
    visits: Counter = Counter()
    cases: Counter = Counter()
    for path in brute_paths(log, dimension, collapse).values():
        visits.update(path)
        cases.update(set(path))
    return visits, cases


def brute_edge_durations(log: EventLog, dimension: str, collapse: bool) -> tuple[dict, int]:
    durations: dict[tuple[str, str], list[float]] = {}
    negatives = 0
    for trace in log.traces.values():
        steps = brute_steps(trace.events, dimension, collapse)
        for (lbl_a, _, end_a, _), (lbl_b, start_b, _, _) in zip(steps, steps[1:]):
            gap = (start_b - end_a).total_seconds()
            if gap < 0:
                negatives += 1
                gap = 0.0
            durations.setdefault((lbl_a, lbl_b), []).append(gap)
    return durations, negatives


def brute_node_positions(log: EventLog, dimension: str, collapse: bool) -> dict[str, Coordinate]:
    coords: dict[str, list[Coordinate]] = {}
    for trace in log.traces.values():
        for lbl, _, _, coord in brute_steps(trace.events, dimension, collapse):
            if coord is not None:
                coords.setdefault(lbl, []).append(coord)
    return {
        lbl: Coordinate(sum(c.lat for c in cs) / len(cs), sum(c.lon for c in cs) / len(cs))
        for lbl, cs in coords.items()
    }


def brute_endpoint_cases(log: EventLog, dimension: str, source: str, destination: str) -> set[str]:
    kept = set()
    for case_id, path in brute_paths(log, dimension, collapse=True).items():
        if path and path[0] == source and path[-1] == destination:
            kept.add(case_id)
    return kept


def brute_variant_counts(log: EventLog, dimension: str) -> Counter:
    return Counter(brute_paths(log, dimension, collapse=True).values())


# --- random log construction ---------------------------------------------------

_CITY_POOL = [
    ("Alda", Coordinate(35.1, 46.2)),
    ("Brin", Coordinate(36.4, 48.9)),
    ("Cor", Coordinate(33.8, 51.3)),
    ("Dell", Coordinate(31.2, 54.0)),
    ("Eri", Coordinate(37.9, 57.5)),
    ("Fay", None),  # city without a known coordinate
]
_ACTIVITY_POOL = ["pickup", "check-in", "check-out", "delivery", "scan"]


def random_events(rng: random.Random, max_cases: int = 50, max_events: int = 10):
    """Random geo-tagged events: repeats, ties, and missing data included."""
    t0 = datetime(2021, 3, 1)
    events = []
    eid = 0
    for c in range(rng.randint(1, max_cases)):
        case_id = f"c{c:03d}"
        minute = rng.randint(0, 5000)
        for _ in range(rng.randint(1, max_events)):
            eid += 1
            city, coord = rng.choice(_CITY_POOL)
            if coord is not None and rng.random() < 0.1:
                coord = None  # located city, unlocated event
            elif coord is not None and city == "Brin":
                # several post offices in one city: distinct coordinates
                coord = Coordinate(coord.lat + rng.choice([0.0, 0.05, 0.1]), coord.lon)
            # small (possibly zero) increments produce timestamp ties
            minute += rng.choice([0, 0, 1, 2, 30, 240])
            events.append(Event(
                event_id=str(eid), case_id=case_id,
                timestamp=t0 + timedelta(minutes=minute),
                activity=rng.choice(_ACTIVITY_POOL),
                resource=f"R{rng.randint(1, 4)}",
                city=city, location=coord, seq=eid,
            ))
    return events
