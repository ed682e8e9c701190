"""Geo-tagged event log model: parsing, validation, geocoding.

An event log is a collection of traces (one per case), each an ordered
sequence of events. Events are sorted by (timestamp, event id), with the
event id breaking timestamp ties; traces are keyed and ordered by case id,
so a parsed log is identical for any permutation of the input rows.
All structures are immutable after construction and safe to share.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .geo import Coordinate, Gazetteer, GeoError, Level

#: Postal-export timestamps, e.g. "25-05-2017: 11.50".
DEFAULT_TIMESTAMP_FORMAT = "%d-%m-%Y: %H.%M"

#: Sentinel label for events whose dimension value is missing.
UNKNOWN_LABEL = "<unknown>"

_COLON_WS = re.compile(r":[ \t]*")


class SchemaError(ValueError):
    """The schema mapping does not fit the source file."""


class ParseError(ValueError):
    """A malformed row in strict mode."""


@dataclass(frozen=True, slots=True)
class SchemaMapping:
    """Column-role assignments for a CSV event log.

    case_id_col, timestamp_col and activity_col are mandatory; an event id
    is synthesized from the row number when event_id_col is absent.
    """

    case_id_col: str
    timestamp_col: str
    activity_col: str
    event_id_col: str | None = None
    resource_col: str | None = None
    city_col: str | None = None
    location_col: str | None = None
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT

    def __post_init__(self) -> None:
        for name in ("case_id_col", "timestamp_col", "activity_col"):
            if not getattr(self, name):
                raise SchemaError(f"{name} is mandatory")

    def mapped_columns(self) -> list[str]:
        cols = [self.case_id_col, self.event_id_col, self.timestamp_col,
                self.activity_col, self.resource_col, self.city_col, self.location_col]
        return [c for c in cols if c]

    def to_dict(self) -> dict:
        return {
            "case_id_col": self.case_id_col,
            "event_id_col": self.event_id_col,
            "timestamp_col": self.timestamp_col,
            "timestamp_format": self.timestamp_format,
            "activity_col": self.activity_col,
            "resource_col": self.resource_col,
            "city_col": self.city_col,
            "location_col": self.location_col,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SchemaMapping":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"unknown schema fields: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if v is not None}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise SchemaError(str(exc)) from None


#: Schema of the bundled postal sample (data/postal_sample.csv).
POSTAL_SCHEMA = SchemaMapping(
    case_id_col="Case_id",
    event_id_col="Event_id",
    timestamp_col="Timestamp",
    activity_col="Activity",
    resource_col="Resource",
    city_col="City",
    location_col="Location",
)


@dataclass(frozen=True, slots=True)
class Event:
    event_id: str
    case_id: str
    timestamp: datetime
    activity: str
    resource: str
    city: str
    location: Coordinate | None
    #: source order (row number or generation order); breaks residual ties
    #: but is not part of the event's identity
    seq: int = field(default=0, compare=False)
    #: values of unmapped source columns, aligned with SourceMeta.extra_columns
    extras: tuple[str, ...] | None = None


@dataclass(frozen=True, slots=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, slots=True)
class SourceMeta:
    filename: str
    row_count: int
    columns: tuple[str, ...] = ()
    extra_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class EventLog:
    traces: dict[str, Trace]
    schema: SchemaMapping
    source_meta: SourceMeta

    @property
    def case_count(self) -> int:
        return len(self.traces)

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces.values())

    def iter_events(self) -> Iterator[Event]:
        for trace in self.traces.values():
            yield from trace.events

    def with_traces(self, traces: Iterable[Trace]) -> "EventLog":
        ordered = {t.case_id: t for t in sorted(traces, key=lambda t: t.case_id)}
        return replace(self, traces=ordered)

    @classmethod
    def from_events(cls, events: Iterable[Event], schema: SchemaMapping,
                    source_meta: SourceMeta) -> "EventLog":
        by_case: dict[str, list[Event]] = {}
        for ev in events:
            by_case.setdefault(ev.case_id, []).append(ev)
        traces = {}
        for case_id in sorted(by_case):
            evs = sorted(by_case[case_id], key=_event_sort_key)
            traces[case_id] = Trace(case_id, tuple(evs))
        return cls(traces=traces, schema=schema, source_meta=source_meta)


def _event_sort_key(ev: Event):
    eid = ev.event_id
    id_key = (0, int(eid)) if eid.isdigit() else (1, eid)
    return (ev.timestamp, id_key, ev.seq)


def parse_timestamp(raw: str, fmt: str = DEFAULT_TIMESTAMP_FORMAT) -> datetime:
    """Parse a timestamp, tolerating missing/extra whitespace after colons.

    Interpreted as UTC (naive); real postal exports mix "25-05-2017: 11.50"
    and "25-05-2017:14.01" in one file.
    """
    raw = raw.strip()
    try:
        return datetime.strptime(raw, fmt)
    except ValueError:
        canon_raw = _COLON_WS.sub(": ", raw)
        canon_fmt = _COLON_WS.sub(": ", fmt)
        return datetime.strptime(canon_raw, canon_fmt)


def parse_location(raw: str) -> Coordinate | None:
    """Parse a "lat,lon" decimal-degrees pair; empty string means absent."""
    raw = raw.strip()
    if not raw:
        return None
    parts = raw.split(",")
    if len(parts) != 2:
        raise GeoError(f"location {raw!r} is not a lat,lon pair")
    return Coordinate(float(parts[0]), float(parts[1]))


@dataclass(frozen=True, slots=True)
class SkippedRow:
    line: int
    reason: str


@dataclass
class ParseReport:
    skipped: list[SkippedRow] = field(default_factory=list)

    @property
    def skipped_count(self) -> int:
        return len(self.skipped)

    def to_dict(self) -> dict:
        return {
            "skipped_count": self.skipped_count,
            "skipped": [{"line": s.line, "reason": s.reason} for s in self.skipped],
        }


@dataclass(frozen=True)
class ParseResult:
    log: EventLog
    report: ParseReport


def parse_csv(source: str | Path | TextIO, schema: SchemaMapping, *,
              delimiter: str = ",", strict: bool = False,
              filename: str | None = None) -> ParseResult:
    """Parse a CSV event log into traces grouped by case and sorted.

    Malformed rows (bad timestamp, bad coordinate) are skipped and recorded
    in the report; with strict=True the first one raises ParseError.
    A missing mapped column always raises SchemaError.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        with path.open(newline="", encoding="utf-8") as fh:
            return parse_csv(fh, schema, delimiter=delimiter, strict=strict,
                             filename=filename or path.name)

    reader = csv.reader(source, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file: no header row") from None
    header = [h.strip() for h in header]
    index = {name: i for i, name in enumerate(header)}
    missing = [c for c in schema.mapped_columns() if c not in index]
    if missing:
        raise SchemaError(f"mapped columns missing from header: {missing}")

    mapped = set(schema.mapped_columns())
    extra_columns = tuple(c for c in header if c not in mapped)
    extra_idx = [index[c] for c in extra_columns]
    i_case = index[schema.case_id_col]
    i_ts = index[schema.timestamp_col]
    i_act = index[schema.activity_col]
    i_event = index[schema.event_id_col] if schema.event_id_col else None
    i_res = index[schema.resource_col] if schema.resource_col else None
    i_city = index[schema.city_col] if schema.city_col else None
    i_loc = index[schema.location_col] if schema.location_col else None

    report = ParseReport()
    events: list[Event] = []
    row_count = 0
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        row_count += 1
        try:
            if len(row) < len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}")
            timestamp = parse_timestamp(row[i_ts], schema.timestamp_format)
            location = parse_location(row[i_loc]) if i_loc is not None else None
        except (ValueError, GeoError) as exc:
            if strict:
                raise ParseError(f"line {line}: {exc}") from None
            report.skipped.append(SkippedRow(line, str(exc)))
            continue
        seq = row_count
        events.append(Event(
            event_id=row[i_event].strip() if i_event is not None else str(seq),
            case_id=row[i_case].strip(),
            timestamp=timestamp,
            activity=row[i_act].strip(),
            resource=row[i_res].strip() if i_res is not None else "",
            city=row[i_city].strip() if i_city is not None else "",
            location=location,
            seq=seq,
            extras=tuple(row[i] for i in extra_idx) if extra_idx else None,
        ))

    meta = SourceMeta(filename=filename or "<stream>", row_count=row_count,
                      columns=tuple(header), extra_columns=extra_columns)
    log = EventLog.from_events(events, schema, meta)
    return ParseResult(log, report)


def write_csv(log: EventLog, target: str | Path | TextIO,
              schema: SchemaMapping | None = None) -> None:
    """Serialize a log back to CSV using the (given or original) schema."""
    schema = schema or log.schema
    if isinstance(target, (str, Path)):
        with Path(target).open("w", newline="", encoding="utf-8") as fh:
            write_csv(log, fh, schema)
            return
    writer = csv.writer(target, lineterminator="\n")
    roles = [
        (schema.case_id_col, lambda e: e.case_id),
        (schema.event_id_col, lambda e: e.event_id),
        (schema.timestamp_col, lambda e: _format_timestamp(e.timestamp, schema.timestamp_format)),
        (schema.activity_col, lambda e: e.activity),
        (schema.resource_col, lambda e: e.resource),
        (schema.city_col, lambda e: e.city),
        (schema.location_col, lambda e: _format_location(e.location)),
    ]
    roles = [(col, get) for col, get in roles if col]
    writer.writerow([col for col, _ in roles])
    for trace in log.traces.values():
        for ev in trace.events:
            writer.writerow([get(ev) for _, get in roles])


def _format_timestamp(ts: datetime, fmt: str) -> str:
    return ts.strftime(_COLON_WS.sub(": ", fmt))


def _format_location(coord: Coordinate | None) -> str:
    if coord is None:
        return ""
    # repr keeps the exact float so a rewritten file reparses losslessly
    return f"{coord.lat!r},{coord.lon!r}"


# --- validation -------------------------------------------------------------

DUPLICATE_EVENT_ID = "duplicate_event_id"
MISSING_LOCATION = "missing_location"
REORDERED_TRACE = "reordered_trace"
SINGLE_EVENT_TRACE = "single_event_trace"


@dataclass(frozen=True, slots=True)
class Anomaly:
    kind: str
    case_id: str | None
    detail: str


@dataclass
class ValidationReport:
    anomalies: list[Anomaly] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.anomalies)

    def count(self, kind: str) -> int:
        return sum(1 for a in self.anomalies if a.kind == kind)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "anomalies": [
                {"kind": a.kind, "case_id": a.case_id, "detail": a.detail}
                for a in self.anomalies
            ],
        }

    def to_text(self) -> str:
        if not self.anomalies:
            return "ok: no anomalies\n"
        lines = [f"{self.total} anomalies"]
        for a in self.anomalies:
            where = f" case={a.case_id}" if a.case_id else ""
            lines.append(f"  {a.kind}{where}: {a.detail}")
        return "\n".join(lines) + "\n"


def validate(log: EventLog) -> ValidationReport:
    """Report per-trace anomalies; never raises (report-only)."""
    report = ValidationReport()
    seen: dict[str, int] = {}
    for ev in log.iter_events():
        seen[ev.event_id] = seen.get(ev.event_id, 0) + 1
    for event_id, n in seen.items():
        if n > 1:
            report.anomalies.append(Anomaly(
                DUPLICATE_EVENT_ID, None, f"event_id {event_id!r} occurs {n} times"))
    for trace in log.traces.values():
        missing = sum(1 for ev in trace.events if ev.location is None)
        if missing:
            report.anomalies.append(Anomaly(
                MISSING_LOCATION, trace.case_id, f"{missing} events without location"))
        seqs = [ev.seq for ev in trace.events]
        if any(b < a for a, b in zip(seqs, seqs[1:])):
            report.anomalies.append(Anomaly(
                REORDERED_TRACE, trace.case_id,
                "source rows were not in chronological order (trace re-sorted)"))
        if len(trace.events) == 1:
            report.anomalies.append(Anomaly(
                SINGLE_EVENT_TRACE, trace.case_id, "trace has a single event"))
    return report


# --- geocoding --------------------------------------------------------------

class GeocodeError(ValueError):
    """A city could not be resolved in strict mode."""


@dataclass(frozen=True)
class GeocodeResult:
    log: EventLog
    unresolved: tuple[str, ...]


def geocode(log: EventLog, gazetteer: Gazetteer, *, strict: bool = False) -> GeocodeResult:
    """Fill missing event locations from the gazetteer's city coordinates.

    Events that already carry a location are untouched, so the operation is
    idempotent. Unresolved city names are reported (strict: raised).
    """
    unresolved: set[str] = set()
    new_traces = []
    for trace in log.traces.values():
        changed = False
        events = list(trace.events)
        for i, ev in enumerate(events):
            if ev.location is not None:
                continue
            place = gazetteer.lookup(ev.city, Level.CITY) if ev.city else None
            if place is None:
                unresolved.add(ev.city or "")
                continue
            events[i] = replace(ev, location=place.coord)
            changed = True
        new_traces.append(Trace(trace.case_id, tuple(events)) if changed else trace)
    if strict and unresolved:
        raise GeocodeError(f"unresolved cities: {sorted(unresolved)}")
    result_log = log.with_traces(new_traces)
    return GeocodeResult(result_log, tuple(sorted(unresolved)))


def parse_csv_string(text: str, schema: SchemaMapping, **kwargs) -> ParseResult:
    return parse_csv(io.StringIO(text), schema, **kwargs)
