from __future__ import annotations

from datetime import datetime, timedelta
from pathlib import Path

import pytest

from geoflow.eventlog import Event, EventLog, SourceMeta, POSTAL_SCHEMA, parse_csv
from geoflow.geo import Coordinate, load_gazetteer

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"
POSTAL_SAMPLE_CSV = DATA_DIR / "postal_sample.csv"
GAZETTEER_CSV = DATA_DIR / "gazetteer_iran.csv"
LAYERS_DIR = DATA_DIR / "layers"

# Independently verified constants for the bundled postal sample
# (second implementation of the great-circle formula; see oracles.py).
MASHHAD = Coordinate(37.75888900, 45.97833300)
TEHRAN = Coordinate(37.55527800, 45.07250000)
SHIRAZ_ENTRY = Coordinate(35.84001880, 50.93909060)
DIST_MASHHAD_TEHRAN_KM = 82.89273822544274
DIST_TEHRAN_SHIRAZ_KM = 556.606398662964
DUR_MASHHAD_TEHRAN_S = 65460.0
DUR_TEHRAN_SHIRAZ_S = 65220.0


@pytest.fixture(scope="session")
def postal_log():
    return parse_csv(POSTAL_SAMPLE_CSV, POSTAL_SCHEMA).log


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer(GAZETTEER_CSV)


_T0 = datetime(2020, 1, 1, 8, 0, 0)


def make_event(case_id: str, seq: int, activity: str = "work", city: str = "A",
               minutes: int | None = None, coord: Coordinate | None = None,
               resource: str = "", event_id: str | None = None,
               timestamp: datetime | None = None) -> Event:
    ts = timestamp or (_T0 + timedelta(minutes=seq if minutes is None else minutes))
    return Event(
        event_id=event_id if event_id is not None else str(seq),
        case_id=case_id, timestamp=ts, activity=activity, resource=resource,
        city=city, location=coord, seq=seq,
    )


def build_log(events, schema=POSTAL_SCHEMA) -> EventLog:
    events = list(events)
    meta = SourceMeta(filename="<test>", row_count=len(events))
    return EventLog.from_events(events, schema, meta)
