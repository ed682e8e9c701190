"""Command-line front door mirroring the server pipeline.

Machine-readable output goes to stdout (or --out); diagnostics go to
stderr. Exit codes: 0 success, 1 usage error, 2 data error (malformed
input, strict-mode validation failure).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import pipeline
from .discovery import Dimension, filter_endpoints
from .eventlog import (
    EventLog, GeocodeError, ParseError, SchemaError, SchemaMapping, POSTAL_SCHEMA,
    geocode, parse_csv, validate, write_csv,
)
from .export import GeoJsonError, dumps_canonical, to_dot
from .geo import GeoError, load_gazetteer
from .metrics import assessments_csv, assess
from .pipeline import QueryError
from .synthlog import ConfigError, generate, load_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_DATA_ERRORS = (SchemaError, ParseError, GeocodeError, ConfigError, GeoError,
                GeoJsonError, ConnectionError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _add_log_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("log", help="event log CSV file")
    sub.add_argument("--schema", help="schema mapping JSON file (default: postal sample schema)")
    sub.add_argument("--gazetteer", help="gazetteer CSV for geocoding and hierarchy levels")
    sub.add_argument("--strict", action="store_true",
                     help="fail on malformed rows, anomalies, or unresolved cities")


def _add_map_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dimension", default="city",
                     help="node dimension: activity, city, resource, or a column name")
    sub.add_argument("--level", help="aggregate at hierarchy level: office, city, province, country")
    sub.add_argument("--collapse", action=argparse.BooleanOptionalAction, default=True,
                     help="merge runs of identical consecutive labels")
    sub.add_argument("--source", help="endpoints filter: first label of kept traces")
    sub.add_argument("--destination", help="endpoints filter: last label of kept traces")
    sub.add_argument("--from", dest="time_from", help="time filter start (ISO 8601, UTC)")
    sub.add_argument("--to", dest="time_to", help="time filter end (ISO 8601, UTC)")
    sub.add_argument("--min-freq", type=int, default=0,
                     help="drop edges below this frequency")


def build_parser() -> _Parser:
    parser = _Parser(prog="geoflow",
                     description="Geo-enabled process map discovery from event logs.")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("discover", help="discover a process map",
                            description="Discover a process map and write it as GeoJSON or DOT.")
    _add_log_flags(p)
    _add_map_flags(p)
    p.add_argument("--format", choices=["geojson", "dot"], default="geojson",
                   help="output format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_discover)

    p = commands.add_parser("variants", help="list assessed route variants",
                            description="Rank route variants by traffic and distance.")
    _add_log_flags(p)
    p.add_argument("--dimension", default="city", help="node dimension")
    p.add_argument("--source", help="endpoints filter: first label")
    p.add_argument("--destination", help="endpoints filter: last label")
    p.add_argument("--format", choices=["json", "csv"], default="json", help="output format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_variants)

    p = commands.add_parser("frames", help="time-binned map frames",
                            description="Partition the log into time windows and map each.")
    _add_log_flags(p)
    p.add_argument("--dimension", default="city", help="node dimension")
    p.add_argument("--collapse", action=argparse.BooleanOptionalAction, default=True,
                   help="merge runs of identical consecutive labels")
    p.add_argument("--bin-s", type=int, required=True, help="window width in seconds")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_frames)

    p = commands.add_parser("export", help="write the full artifact bundle",
                            description="Write nodes/edges GeoJSON, DOT, variants CSV, "
                                        "and a summary into a directory.")
    _add_log_flags(p)
    _add_map_flags(p)
    p.add_argument("--out-dir", required=True, help="target directory")
    p.set_defaults(func=cmd_export)

    p = commands.add_parser("generate", help="generate a synthetic log",
                            description="Generate a deterministic synthetic parcel log.")
    p.add_argument("--config", required=True, help="network config TOML file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output CSV file (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser("validate", help="report log anomalies",
                            description="Parse a log and report per-trace anomalies.")
    _add_log_flags(p)
    p.add_argument("--format", choices=["text", "json"], default="text", help="report format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser("serve", help="run the HTTP API",
                            description="Serve maps, variants, frames, and evidence layers.")
    p.add_argument("--host", default="127.0.0.1", help="listen address")
    p.add_argument("--port", type=int, default=8000, help="listen port")
    p.add_argument("--gazetteer", help="gazetteer CSV path")
    p.add_argument("--layers-dir", help="directory of evidence *.geojson layers")
    p.add_argument("--strict", action="store_true", help="strict-mode uploads")
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed CORS origin (repeatable; default *)")
    p.set_defaults(func=cmd_serve)

    return parser


def _load_schema(args) -> SchemaMapping:
    if not args.schema:
        return POSTAL_SCHEMA
    path = Path(args.schema)
    if not path.is_file():
        raise UsageError(f"schema file not found: {path}")
    return SchemaMapping.from_dict(json.loads(path.read_text(encoding="utf-8")))


def _load_log(args) -> EventLog:
    path = Path(args.log)
    if not path.is_file():
        raise UsageError(f"log file not found: {path}")
    parsed = parse_csv(path, _load_schema(args), strict=args.strict)
    log = parsed.log
    if parsed.report.skipped_count:
        print(f"skipped {parsed.report.skipped_count} malformed rows", file=sys.stderr)
    if args.gazetteer:
        log = geocode(log, _load_gazetteer(args), strict=args.strict).log
    return log


def _load_gazetteer(args):
    path = Path(args.gazetteer)
    if not path.is_file():
        raise UsageError(f"gazetteer file not found: {path}")
    return load_gazetteer(path)


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _map_query(args) -> pipeline.MapQuery:
    try:
        return pipeline.query_from_params(
            dimension=args.dimension, level=args.level, collapse=args.collapse,
            source=args.source, destination=args.destination,
            time_from=args.time_from, time_to=args.time_to, min_freq=args.min_freq)
    except QueryError as exc:
        raise UsageError(str(exc)) from None


def cmd_discover(args) -> int:
    log = _load_log(args)
    query = _map_query(args)
    gaz = _load_gazetteer(args) if args.gazetteer else None
    if query.level and gaz is None:
        raise UsageError("--level requires --gazetteer")
    if args.format == "dot":
        payload = to_dot(pipeline.build_map(log, query, gaz))
    else:
        payload = pipeline.map_document_json(log, query, gaz)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_variants(args) -> int:
    log = _load_log(args)
    if (args.source is None) != (args.destination is None):
        raise UsageError("--source and --destination must be given together")
    dim = Dimension.parse(args.dimension)
    if args.format == "csv":
        work = log
        if args.source:
            work = filter_endpoints(work, dim, args.source, args.destination)
        payload = assessments_csv(assess(work, dim))
    else:
        payload = pipeline.variants_document_json(log, dim, args.source, args.destination)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_frames(args) -> int:
    if args.bin_s <= 0:
        raise UsageError("--bin-s must be positive")
    log = _load_log(args)
    dim = Dimension.parse(args.dimension)
    payload = pipeline.frames_document_json(log, dim, args.bin_s, args.collapse)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    log = _load_log(args)
    query = _map_query(args)
    gaz = _load_gazetteer(args) if args.gazetteer else None
    if query.level and gaz is None:
        raise UsageError("--level requires --gazetteer")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = pipeline.map_document(log, query, gaz)
    (out_dir / "nodes.geojson").write_text(dumps_canonical(doc["nodes"]), encoding="utf-8")
    (out_dir / "edges.geojson").write_text(dumps_canonical(doc["edges"]), encoding="utf-8")
    (out_dir / "summary.json").write_text(dumps_canonical(doc["summary"]), encoding="utf-8")
    pmap = pipeline.build_map(log, query, gaz)
    (out_dir / "map.dot").write_text(to_dot(pmap), encoding="utf-8")
    (out_dir / "variants.csv").write_text(
        assessments_csv(assess(log, query.dimension)), encoding="utf-8")
    print(f"wrote 5 artifacts to {out_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_generate(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    config = load_config(path)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    log = generate(config)
    if args.out:
        write_csv(log, args.out)
    else:
        write_csv(log, sys.stdout)
    print(f"generated {log.case_count} cases / {log.event_count} events", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    path = Path(args.log)
    if not path.is_file():
        raise UsageError(f"log file not found: {path}")
    parsed = parse_csv(path, _load_schema(args), strict=args.strict)
    report = validate(parsed.log)
    if args.format == "json":
        payload = dumps_canonical({
            "skipped_rows": parsed.report.to_dict(),
            "validation": report.to_dict(),
        })
    else:
        payload = report.to_text()
        if parsed.report.skipped_count:
            payload = f"{parsed.report.skipped_count} rows skipped\n" + payload
    _emit(payload, args.out)
    if args.strict and (report.total > 0 or parsed.report.skipped_count > 0):
        print("strict validation failed", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import ServerConfig, serve

    config = ServerConfig(
        gazetteer_path=args.gazetteer,
        layers_dir=args.layers_dir,
        strict=args.strict,
        cors_origins=tuple(args.cors_origin) if args.cors_origin else ("*",),
    )
    serve(config, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
