"""Geodesy primitives, gazetteer, and the location hierarchy.

Distances are great-circle kilometers on a sphere of radius 6371.0 km.
The hierarchy is fixed to four levels: office < city < province < country.
A place's parent must sit at a strictly coarser level (skipping levels is
allowed, e.g. a city directly under a country).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

EARTH_RADIUS_KM = 6371.0


class GeoError(ValueError):
    """Invalid coordinate, place, or gazetteer data."""


class Level(str, Enum):
    OFFICE = "office"
    CITY = "city"
    PROVINCE = "province"
    COUNTRY = "country"

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]

    @classmethod
    def parse(cls, value: str) -> "Level":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise GeoError(f"unknown hierarchy level: {value!r}") from None


_LEVEL_RANK = {Level.OFFICE: 0, Level.CITY: 1, Level.PROVINCE: 2, Level.COUNTRY: 3}


@dataclass(frozen=True, slots=True)
class Coordinate:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise GeoError(f"non-finite coordinate: ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise GeoError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise GeoError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True, slots=True)
class Place:
    id: str
    name: str
    level: Level
    parent_id: str | None
    coord: Coordinate


def haversine_km(a: Coordinate, b: Coordinate) -> float:
    """Great-circle distance between two coordinates, in kilometers.

    Symmetric, zero iff the coordinates are equal, bounded by pi*R.
    """
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    # floating error can push h epsilon past 1 for near-antipodal pairs
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def place_id(name: str, level: Level) -> str:
    return f"{level.value}:{name}"


class Gazetteer:
    """Immutable index of named places with a validated parent hierarchy."""

    def __init__(self, places: Iterable[Place]):
        self._places: dict[str, Place] = {}
        self._by_name: dict[tuple[str, Level], Place] = {}
        for p in places:
            if p.id in self._places:
                raise GeoError(f"duplicate place id {p.id!r}")
            key = (p.name, p.level)
            if key in self._by_name:
                raise GeoError(f"duplicate place {p.name!r} at level {p.level.value}")
            self._places[p.id] = p
            self._by_name[key] = p
        for p in self._places.values():
            if p.level is Level.COUNTRY:
                if p.parent_id is not None:
                    raise GeoError(f"country {p.name!r} must not have a parent")
                continue
            if p.parent_id is None:
                continue
            parent = self._places.get(p.parent_id)
            if parent is None:
                raise GeoError(f"dangling parent {p.parent_id!r} of {p.name!r}")
            if parent.level.rank <= p.level.rank:
                raise GeoError(
                    f"{p.name!r} ({p.level.value}) has parent {parent.name!r} "
                    f"at non-coarser level {parent.level.value}"
                )

    def __len__(self) -> int:
        return len(self._places)

    def __iter__(self):
        return iter(self._places.values())

    def get(self, pid: str) -> Place | None:
        return self._places.get(pid)

    def lookup(self, name: str, level: Level) -> Place | None:
        return self._by_name.get((name, level))

    def has_level(self, level: Level) -> bool:
        return any(p.level is level for p in self._places.values())

    def ancestor_at_level(self, pid: str, level: Level) -> Place:
        """The unique ancestor of a place at the requested (coarser) level.

        Returns the place itself when the levels are equal.
        """
        place = self._places.get(pid)
        if place is None:
            raise GeoError(f"unknown place id {pid!r}")
        if level.rank < place.level.rank:
            raise GeoError(
                f"level {level.value} is finer than {place.name!r}'s level {place.level.value}"
            )
        while place.level is not level:
            if place.parent_id is None:
                raise GeoError(f"no ancestor of {pid!r} at level {level.value}")
            place = self._places[place.parent_id]
            if place.level.rank > level.rank:
                raise GeoError(f"no ancestor of {pid!r} at level {level.value}")
        return place


def ancestor_at_level(gazetteer: Gazetteer, pid: str, level: Level) -> Place:
    return gazetteer.ancestor_at_level(pid, level)


def places_from_rows(rows: Iterable[tuple[str, Level, str, Coordinate]]) -> list[Place]:
    """Build places from (name, level, parent-name, coord) rows.

    Parent references are by name and resolve to the nearest strictly
    coarser level where that name exists.
    """
    rows = list(rows)
    by_name_level = {(name, level) for name, level, _, _ in rows}
    places = []
    for name, level, parent, coord in rows:
        parent_id = None
        if parent:
            candidates = [
                lv for lv in Level if lv.rank > level.rank and (parent, lv) in by_name_level
            ]
            if not candidates:
                raise GeoError(f"dangling parent {parent!r} of {name!r}")
            parent_id = place_id(parent, min(candidates, key=lambda lv: lv.rank))
        places.append(Place(place_id(name, level), name, level, parent_id, coord))
    return places


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Load a gazetteer CSV with columns name,level,parent,lat,lon."""
    path = Path(path)
    rows: list[tuple[str, Level, str, Coordinate]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return Gazetteer([])
        missing = {"name", "level", "parent", "lat", "lon"} - set(reader.fieldnames)
        if missing:
            raise GeoError(f"gazetteer {path.name} missing columns: {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            name = (row["name"] or "").strip()
            if not name:
                raise GeoError(f"{path.name}:{lineno}: empty place name")
            level = Level.parse(row["level"])
            try:
                coord = Coordinate(float(row["lat"]), float(row["lon"]))
            except (TypeError, ValueError) as exc:
                raise GeoError(f"{path.name}:{lineno}: bad coordinate: {exc}") from None
            rows.append((name, level, (row["parent"] or "").strip(), coord))
    try:
        return Gazetteer(places_from_rows(rows))
    except GeoError as exc:
        raise GeoError(f"{path.name}: {exc}") from None
