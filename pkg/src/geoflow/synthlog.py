"""Deterministic synthetic parcel-network log generator.

Each case follows a weighted-random route through the network and emits
the postal event pattern: pickup and check-out at the origin, check-in and
check-out at every hop, then check-in, check-out and delivery at the
destination (2n+1 events for an n-city route). Randomness comes from one
seeded Mersenne Twister (random.Random), so the same seed yields a
byte-identical log; inter-event gaps are uniform on [mean-jitter,
mean+jitter], clamped to at least one second.
"""
from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .eventlog import Event, EventLog, SourceMeta, POSTAL_SCHEMA
from .geo import Coordinate, Gazetteer, Level, Place, places_from_rows

ACT_PICKUP = "Parcel pickup"
ACT_CHECK_IN = "Parcel check in"
ACT_CHECK_OUT = "Parcel check-out"
ACT_DELIVERY = "Parcel Delivery"


class ConfigError(ValueError):
    """Invalid generator configuration."""


@dataclass(frozen=True, slots=True)
class HopTiming:
    mean_s: float
    jitter_s: float = 0.0

    def __post_init__(self) -> None:
        if self.mean_s <= 0:
            raise ConfigError("mean_s must be positive")
        if self.jitter_s < 0:
            raise ConfigError("jitter_s must be non-negative")


@dataclass(frozen=True, slots=True)
class Route:
    path: tuple[str, ...]
    weight: float


@dataclass(frozen=True)
class NetworkConfig:
    places: tuple[Place, ...]
    routes: tuple[Route, ...]
    cases: int
    seed: int
    time_origin: datetime
    inter_hop: HopTiming = HopTiming(mean_s=6 * 3600)
    dwell: HopTiming = HopTiming(mean_s=45 * 60)
    case_interval_s: float = 60.0

    def __post_init__(self) -> None:
        if self.cases < 0:
            raise ConfigError("cases must be non-negative")
        if not self.routes:
            raise ConfigError("at least one route is required")
        cities = {p.name for p in self.places if p.level is Level.CITY}
        for route in self.routes:
            if route.weight <= 0:
                raise ConfigError(f"route {route.path} has non-positive weight")
            if len(route.path) < 2:
                raise ConfigError(f"route {route.path} must visit at least two cities")
            unknown = [c for c in route.path if c not in cities]
            if unknown:
                raise ConfigError(f"route cities not among places: {unknown}")
            if any(a == b for a, b in zip(route.path, route.path[1:])):
                raise ConfigError(f"route {route.path} repeats a city consecutively")

    def gazetteer(self) -> Gazetteer:
        return Gazetteer(self.places)

    def events_per_case(self, route: Route) -> int:
        return 2 * len(route.path) + 1

    def expected_events_per_case(self) -> float:
        total_w = sum(r.weight for r in self.routes)
        return sum(r.weight * self.events_per_case(r) for r in self.routes) / total_w


def _city_index(config: NetworkConfig) -> tuple[dict[str, Coordinate], dict[str, str]]:
    """City coordinates and the office resource serving each city."""
    coords: dict[str, Coordinate] = {}
    offices: dict[str, str] = {}
    cities = [p for p in config.places if p.level is Level.CITY]
    for p in cities:
        coords[p.name] = p.coord
    for p in sorted(config.places, key=lambda p: p.name):
        if p.level is Level.OFFICE and p.parent_id:
            for city in cities:
                if city.id == p.parent_id and city.name not in offices:
                    offices[city.name] = p.name
    for i, p in enumerate(sorted(cities, key=lambda p: p.name)):
        offices.setdefault(p.name, f"P.O. {i + 1}")
    return coords, offices


def generate(config: NetworkConfig) -> EventLog:
    """Generate a log; identical configs (same seed) yield identical logs."""
    rng = random.Random(config.seed)
    coords, offices = _city_index(config)
    paths = [r.path for r in config.routes]
    weights = [r.weight for r in config.routes]

    def gap(timing: HopTiming) -> int:
        lo = timing.mean_s - timing.jitter_s
        hi = timing.mean_s + timing.jitter_s
        return max(1, round(rng.uniform(lo, hi)))

    events: list[Event] = []
    origin = config.time_origin
    interval = config.case_interval_s
    eid = 0
    for i in range(config.cases):
        case_id = str(1_000_000 + i)
        path = rng.choices(paths, weights)[0]
        t = origin + timedelta(seconds=round(i * interval))

        def emit(activity: str, city: str, resource: str, when: datetime) -> None:
            nonlocal eid
            eid += 1
            events.append(Event(
                event_id=str(eid), case_id=case_id, timestamp=when,
                activity=activity, resource=resource, city=city,
                location=coords[city], seq=eid,
            ))

        first = path[0]
        emit(ACT_PICKUP, first, offices[first], t)
        t += timedelta(seconds=gap(config.dwell))
        emit(ACT_CHECK_OUT, first, offices[first], t)
        for city in path[1:]:
            t += timedelta(seconds=gap(config.inter_hop))
            emit(ACT_CHECK_IN, city, offices[city], t)
            t += timedelta(seconds=gap(config.dwell))
            emit(ACT_CHECK_OUT, city, offices[city], t)
        t += timedelta(seconds=gap(config.dwell))
        emit(ACT_DELIVERY, path[-1], f"Postman {rng.randint(1, 99)}", t)

    meta = SourceMeta(filename=f"synthetic(seed={config.seed})", row_count=len(events))
    return EventLog.from_events(events, POSTAL_SCHEMA, meta)


# --- benchmark-scale configuration -------------------------------------------


def benchmark_network(grid: int = 6) -> tuple[tuple[Place, ...], tuple[Route, ...]]:
    """A deterministic grid network: offices, cities, provinces, one country.

    grid x grid cities with an office each, one province per grid row, and
    a dozen routes (rows, columns, diagonals) of varying length and weight.
    """
    rows: list[tuple[str, Level, str, Coordinate]] = []
    rows.append(("Centria", Level.COUNTRY, "", Coordinate(32.0, 53.0)))
    names: list[list[str]] = []
    for r in range(grid):
        province = f"Province {r + 1}"
        rows.append((province, Level.PROVINCE, "Centria", Coordinate(26.0 + r * 2.2, 52.0)))
        row_names = []
        for c in range(grid):
            name = f"City {r + 1}{chr(ord('A') + c)}"
            coord = Coordinate(26.0 + r * 2.2, 45.0 + c * 2.5)
            rows.append((name, Level.CITY, province, coord))
            rows.append((f"P.O. {r * grid + c + 1:03d}", Level.OFFICE, name, coord))
            row_names.append(name)
        names.append(row_names)

    def across_row(r: int, length: int) -> tuple[str, ...]:
        return tuple(names[r][:length])

    def down_column(c: int, length: int) -> tuple[str, ...]:
        return tuple(names[r][c] for r in range(length))

    def diagonal(length: int, flip: bool = False) -> tuple[str, ...]:
        cells = range(length)
        return tuple(names[r][grid - 1 - r if flip else r] for r in cells)

    routes = (
        Route(across_row(0, 3), 8.0),
        Route(across_row(1, 4), 6.0),
        Route(across_row(2, 6), 5.0),
        Route(down_column(0, 3), 4.0),
        Route(down_column(2, 5), 3.0),
        Route(down_column(5, 6), 3.0),
        Route(diagonal(4), 2.0),
        Route(diagonal(6), 2.0),
        Route(diagonal(4, flip=True), 1.0),
        Route(diagonal(6, flip=True), 1.0),
        Route(tuple(reversed(across_row(3, 5))), 1.0),
        Route(tuple(reversed(down_column(4, 4))), 1.0),
    )
    return tuple(places_from_rows(rows)), routes


def scale_benchmark_config(
    events_target: int,
    *,
    network: tuple[tuple[Place, ...], tuple[Route, ...]] | None = None,
    seed: int = 20170525,
    time_origin: datetime = datetime(2017, 5, 25, 0, 0, 0),
    inter_hop: HopTiming = HopTiming(mean_s=6 * 3600, jitter_s=3600),
    dwell: HopTiming = HopTiming(mean_s=45 * 60, jitter_s=15 * 60),
) -> NetworkConfig:
    """Size a network config so its expected event count hits the target.

    The default network has 36 cities and 12 weighted routes; pass an
    explicit (places, routes) pair for degenerate targets that a network
    this size cannot hit within 5%.
    """
    if events_target <= 0:
        raise ConfigError("events_target must be positive")
    places, routes = network if network is not None else benchmark_network()
    probe = NetworkConfig(places=places, routes=routes, cases=0, seed=seed,
                          time_origin=time_origin, inter_hop=inter_hop, dwell=dwell)
    cases = max(1, round(events_target / probe.expected_events_per_case()))
    return NetworkConfig(places=places, routes=routes, cases=cases, seed=seed,
                         time_origin=time_origin, inter_hop=inter_hop, dwell=dwell,
                         case_interval_s=30.0)


# --- TOML configuration -------------------------------------------------------


def load_config(path: str | Path) -> NetworkConfig:
    """Read a NetworkConfig from a TOML document."""
    path = Path(path)
    with path.open("rb") as fh:
        doc = tomllib.load(fh)
    return config_from_dict(doc, source=path.name)


def config_from_dict(doc: dict, source: str = "<config>") -> NetworkConfig:
    try:
        place_rows = [
            ((p["name"]).strip(), Level.parse(p["level"]),
             (p.get("parent") or "").strip(), Coordinate(float(p["lat"]), float(p["lon"])))
            for p in doc.get("places", [])
        ]
        places = tuple(places_from_rows(place_rows))
        routes = tuple(
            Route(tuple(r["path"]), float(r.get("weight", 1.0)))
            for r in doc.get("routes", [])
        )
        origin = doc["time_origin"]
        if isinstance(origin, str):
            origin = datetime.fromisoformat(origin.replace("Z", "+00:00"))
        if origin.tzinfo is not None:
            origin = origin.astimezone(timezone.utc).replace(tzinfo=None)
        kwargs = {}
        for key in ("inter_hop", "dwell"):
            if key in doc:
                kwargs[key] = HopTiming(
                    mean_s=float(doc[key]["mean_s"]),
                    jitter_s=float(doc[key].get("jitter_s", 0.0)))
        if "case_interval_s" in doc:
            kwargs["case_interval_s"] = float(doc["case_interval_s"])
        return NetworkConfig(
            places=places, routes=routes, cases=int(doc["cases"]),
            seed=int(doc["seed"]), time_origin=origin, **kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None
