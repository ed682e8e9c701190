"""HTTP service exposing logs, discovered maps, variants, frames, and layers.

Uploaded logs are parsed, geocoded, and registered as immutable snapshots;
a map request never observes a partially loaded log. Evidence layers are
curated files scanned from a directory at startup, not a runtime upload
surface. All map-producing endpoints serialize through the shared
pipeline, so their bodies are byte-identical to the CLI's output for the
same parameters.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Form, Query, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import pipeline
from .eventlog import (
    EventLog, ParseError, SchemaError, SchemaMapping, POSTAL_SCHEMA,
    parse_csv_string, geocode, validate,
)
from .export import LayerDoc, dumps_canonical, load_evidence_layer
from .geo import Gazetteer, load_gazetteer
from .pipeline import QueryError, UnresolvableLevelError


@dataclass(frozen=True)
class ServerConfig:
    gazetteer_path: str | None = None
    layers_dir: str | None = None
    strict: bool = False
    cors_origins: tuple[str, ...] = ("*",)

    @classmethod
    def from_env(cls) -> "ServerConfig":
        origins = os.environ.get("GEOFLOW_CORS_ORIGINS", "*")
        return cls(
            gazetteer_path=os.environ.get("GEOFLOW_GAZETTEER") or None,
            layers_dir=os.environ.get("GEOFLOW_LAYERS_DIR") or None,
            strict=os.environ.get("GEOFLOW_STRICT", "").lower() in ("1", "true", "yes"),
            cors_origins=tuple(o.strip() for o in origins.split(",") if o.strip()),
        )


@dataclass(frozen=True)
class LogSession:
    log_id: str
    log: EventLog
    validation: dict
    skipped_rows: int
    unresolved_cities: tuple[str, ...]


@dataclass
class Registry:
    gazetteer: Gazetteer | None
    layers: dict[str, LayerDoc]
    strict: bool
    sessions: dict[str, LogSession] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _counter: int = 0

    def register(self, session_builder) -> LogSession:
        # build outside the lock; swap in atomically so readers never see
        # a partially loaded log
        with self._lock:
            self._counter += 1
            log_id = f"log-{self._counter}"
        session = session_builder(log_id)
        with self._lock:
            self.sessions[log_id] = session
        return session

    def get(self, log_id: str) -> LogSession | None:
        return self.sessions.get(log_id)


def _canonical(payload: str, status_code: int = 200) -> Response:
    return Response(content=payload, status_code=status_code,
                    media_type="application/json")


def _error(status_code: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": message, **extra})


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig.from_env()
    gazetteer = load_gazetteer(config.gazetteer_path) if config.gazetteer_path else None
    layers: dict[str, LayerDoc] = {}
    if config.layers_dir:
        for path in sorted(Path(config.layers_dir).glob("*.geojson")):
            layers[path.stem] = load_evidence_layer(path, path.stem)

    registry = Registry(gazetteer=gazetteer, layers=layers, strict=config.strict)
    app = FastAPI(title="geoflow", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware, allow_origins=list(config.cors_origins),
        allow_methods=["*"], allow_headers=["*"],
    )

    @app.exception_handler(QueryError)
    async def _query_error(_request: Request, exc: QueryError):
        status = 422 if isinstance(exc, UnresolvableLevelError) else 400
        return _error(status, str(exc))

    @app.post("/logs")
    async def upload_log(file: UploadFile,
                         schema_doc: str | None = Form(default=None, alias="schema")):
        body = (await file.read()).decode("utf-8")
        if not body.strip():
            return _error(400, "empty upload body")
        try:
            mapping = (SchemaMapping.from_dict(json.loads(schema_doc))
                       if schema_doc else POSTAL_SCHEMA)
        except (json.JSONDecodeError, SchemaError) as exc:
            return _error(400, f"invalid schema document: {exc}")
        try:
            parsed = parse_csv_string(body, mapping, strict=registry.strict,
                                      filename=file.filename or "<upload>")
        except SchemaError as exc:
            return _error(400, str(exc))
        except ParseError as exc:
            return _error(422, str(exc))
        report = validate(parsed.log)
        if registry.strict and report.total > 0:
            return _error(422, "validation failed in strict mode",
                          validation=report.to_dict())
        log = parsed.log
        unresolved: tuple[str, ...] = ()
        if registry.gazetteer is not None:
            geocoded = geocode(log, registry.gazetteer)
            log, unresolved = geocoded.log, geocoded.unresolved

        def build(log_id: str) -> LogSession:
            return LogSession(log_id=log_id, log=log, validation=report.to_dict(),
                              skipped_rows=parsed.report.skipped_count,
                              unresolved_cities=unresolved)

        session = registry.register(build)
        return JSONResponse({
            "log_id": session.log_id,
            "case_count": session.log.case_count,
            "event_count": session.log.event_count,
            "skipped_rows": session.skipped_rows,
            "unresolved_cities": list(session.unresolved_cities),
            "validation": session.validation,
        })

    @app.get("/logs/{log_id}/map")
    def get_map(log_id: str,
                dimension: str | None = None,
                level: str | None = None,
                collapse: str | None = None,
                source: str | None = None,
                destination: str | None = None,
                time_from: str | None = Query(default=None, alias="from"),
                time_to: str | None = Query(default=None, alias="to"),
                min_freq: str | None = None):
        session = registry.get(log_id)
        if session is None:
            return _error(404, f"unknown log {log_id!r}")
        query = pipeline.query_from_params(
            dimension=dimension, level=level, collapse=collapse, source=source,
            destination=destination, time_from=time_from, time_to=time_to,
            min_freq=min_freq)
        try:
            payload = pipeline.map_document_json(session.log, query, registry.gazetteer)
        except SchemaError as exc:
            return _error(400, str(exc))
        return _canonical(payload)

    @app.get("/logs/{log_id}/variants")
    def get_variants(log_id: str,
                     dimension: str | None = None,
                     source: str | None = None,
                     destination: str | None = None):
        session = registry.get(log_id)
        if session is None:
            return _error(404, f"unknown log {log_id!r}")
        query = pipeline.query_from_params(dimension=dimension, source=source,
                                           destination=destination)
        try:
            payload = pipeline.variants_document_json(
                session.log, query.dimension, source or None, destination or None)
        except SchemaError as exc:
            return _error(400, str(exc))
        return _canonical(payload)

    @app.get("/logs/{log_id}/frames")
    def get_frames(log_id: str,
                   dimension: str | None = None,
                   collapse: str | None = None,
                   bin_s: int = 0):
        session = registry.get(log_id)
        if session is None:
            return _error(404, f"unknown log {log_id!r}")
        if bin_s <= 0:
            return _error(400, "bin_s must be a positive number of seconds")
        query = pipeline.query_from_params(dimension=dimension, collapse=collapse)
        payload = pipeline.frames_document_json(
            session.log, query.dimension, bin_s, query.collapse)
        return _canonical(payload)

    @app.get("/layers")
    def list_layers():
        catalog = [
            {"name": doc.name, "kind": doc.kind.value, "feature_count": doc.feature_count}
            for doc in registry.layers.values()
        ]
        return _canonical(dumps_canonical({"layers": catalog}))

    @app.get("/layers/{name}")
    def get_layer(name: str):
        doc = registry.layers.get(name)
        if doc is None:
            return _error(404, f"unknown layer {name!r}")
        return _canonical(doc.to_json())

    return app


def serve(config: ServerConfig, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port, log_level="info")
