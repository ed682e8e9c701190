from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from conftest import GAZETTEER_CSV, LAYERS_DIR, POSTAL_SAMPLE_CSV
from geoflow import pipeline
from geoflow.eventlog import POSTAL_SCHEMA, parse_csv
from geoflow.export import load_evidence_layer
from geoflow.geo import load_gazetteer
from geoflow.server import ServerConfig, create_app


@pytest.fixture(scope="module")
def client():
    app = create_app(ServerConfig(gazetteer_path=str(GAZETTEER_CSV),
                                  layers_dir=str(LAYERS_DIR)))
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def log_id(client):
    with POSTAL_SAMPLE_CSV.open("rb") as fh:
        response = client.post("/logs", files={"file": ("postal_sample.csv", fh, "text/csv")})
    assert response.status_code == 200
    return response.json()["log_id"]


class TestUpload:
    def test_postal_sample_counts(self, client):
        with POSTAL_SAMPLE_CSV.open("rb") as fh:
            r = client.post("/logs", files={"file": ("postal_sample.csv", fh, "text/csv")})
        body = r.json()
        assert r.status_code == 200
        assert body["case_count"] == 1
        assert body["event_count"] == 7
        assert body["validation"]["total"] == 0

    def test_empty_body_rejected(self, client):
        r = client.post("/logs", files={"file": ("empty.csv", b"", "text/csv")})
        assert r.status_code == 400

    def test_reupload_gets_fresh_id(self, client):
        ids = set()
        for _ in range(2):
            with POSTAL_SAMPLE_CSV.open("rb") as fh:
                r = client.post("/logs", files={"file": ("postal_sample.csv", fh, "text/csv")})
            ids.add(r.json()["log_id"])
        assert len(ids) == 2

    def test_invalid_schema_document(self, client):
        r = client.post("/logs", files={"file": ("t.csv", b"a,b\n", "text/csv")},
                        data={"schema": "{not json"})
        assert r.status_code == 400

    def test_schema_mismatch_rejected(self, client):
        r = client.post("/logs", files={"file": ("t.csv", b"Other\nx\n", "text/csv")})
        assert r.status_code == 400

    def test_custom_schema_accepted(self, client):
        body = "id,when,what\n9,25-05-2017: 10.00,ship\n9,25-05-2017: 11.00,recv\n"
        schema = {"case_id_col": "id", "timestamp_col": "when", "activity_col": "what"}
        r = client.post("/logs", files={"file": ("t.csv", body.encode(), "text/csv")},
                        data={"schema": json.dumps(schema)})
        assert r.status_code == 200
        assert r.json()["event_count"] == 2

    def test_strict_mode_returns_422_with_report(self):
        app = create_app(ServerConfig(strict=True))
        with TestClient(app) as strict_client:
            body = "Case_id,Timestamp,Activity\n1,25-05-2017: 10.00,only\n"
            schema = {"case_id_col": "Case_id", "timestamp_col": "Timestamp",
                      "activity_col": "Activity"}
            r = strict_client.post(
                "/logs", files={"file": ("t.csv", body.encode(), "text/csv")},
                data={"schema": json.dumps(schema)})
            assert r.status_code == 422
            assert r.json()["validation"]["total"] >= 1


class TestMapEndpoint:
    def test_endpoint_filtered_map(self, client, log_id):
        r = client.get(f"/logs/{log_id}/map",
                       params={"dimension": "city", "source": "Mashhad",
                               "destination": "Shiraz"})
        assert r.status_code == 200
        body = r.json()
        assert len(body["nodes"]["features"]) == 3
        assert len(body["edges"]["features"]) == 2

    def test_unmatched_source_yields_no_features(self, client, log_id):
        r = client.get(f"/logs/{log_id}/map",
                       params={"source": "Tehran", "destination": "Shiraz"})
        assert r.status_code == 200
        assert len(r.json()["nodes"]["features"]) == 0

    def test_unknown_log_404(self, client):
        assert client.get("/logs/log-999/map").status_code == 404

    def test_bad_params_400(self, client, log_id):
        r = client.get(f"/logs/{log_id}/map", params={"source": "Mashhad"})
        assert r.status_code == 400
        r = client.get(f"/logs/{log_id}/map", params={"min_freq": "-2"})
        assert r.status_code == 400
        r = client.get(f"/logs/{log_id}/map", params={"from": "bogus", "to": "bogus"})
        assert r.status_code == 400

    def test_level_aggregation(self, client, log_id):
        r = client.get(f"/logs/{log_id}/map", params={"level": "country"})
        assert r.status_code == 200
        labels = [f["properties"]["label"] for f in r.json()["nodes"]["features"]]
        assert labels == ["Iran"]

    def test_unresolvable_level_422(self, tmp_path):
        path = tmp_path / "cities_only.csv"
        path.write_text("name,level,parent,lat,lon\nX,city,,1.0,2.0\n")
        app = create_app(ServerConfig(gazetteer_path=str(path)))
        with TestClient(app) as c:
            body = "Case_id,Timestamp,Activity,City\n1,25-05-2017: 10.00,a,X\n"
            schema = {"case_id_col": "Case_id", "timestamp_col": "Timestamp",
                      "activity_col": "Activity", "city_col": "City"}
            up = c.post("/logs", files={"file": ("t.csv", body.encode(), "text/csv")},
                        data={"schema": json.dumps(schema)})
            r = c.get(f"/logs/{up.json()['log_id']}/map", params={"level": "office"})
            assert r.status_code == 422

    def test_body_matches_shared_pipeline_bytes(self, client, log_id):
        params = {"dimension": "city", "collapse": "true", "min_freq": "0"}
        r = client.get(f"/logs/{log_id}/map", params=params)
        log = parse_csv(POSTAL_SAMPLE_CSV, POSTAL_SCHEMA).log
        gaz = load_gazetteer(GAZETTEER_CSV)
        from geoflow.eventlog import geocode
        query = pipeline.query_from_params(**{"dimension": "city", "collapse": "true",
                                              "min_freq": "0"})
        expected = pipeline.map_document_json(geocode(log, gaz).log, query, gaz)
        assert r.content == expected.encode("utf-8")


class TestVariantsEndpoint:
    def test_postal_sample_variant(self, client, log_id):
        r = client.get(f"/logs/{log_id}/variants", params={"dimension": "city"})
        assert r.status_code == 200
        body = r.json()
        assert body["variant_count"] == 1
        v = body["variants"][0]
        assert v["rank_by_distance"] == 1 and v["rank_by_traffic"] == 1
        assert v["path"] == ["Mashhad", "Tehran", "Shiraz"]

    def test_unknown_log_404(self, client):
        assert client.get("/logs/log-999/variants").status_code == 404

    def test_lonely_source_400(self, client, log_id):
        r = client.get(f"/logs/{log_id}/variants", params={"source": "Mashhad"})
        assert r.status_code == 400


class TestFramesEndpoint:
    def test_single_weekly_frame(self, client, log_id):
        r = client.get(f"/logs/{log_id}/frames", params={"bin_s": 604800})
        assert r.status_code == 200
        body = r.json()
        assert body["frame_count"] == 1
        window = body["frames"][0]["window"]
        assert window["start"].endswith("Z")

    def test_zero_bin_400(self, client, log_id):
        assert client.get(f"/logs/{log_id}/frames",
                          params={"bin_s": 0}).status_code == 400

    def test_frame_traces_sum_to_total(self, client, log_id):
        r = client.get(f"/logs/{log_id}/frames", params={"bin_s": 3600})
        body = r.json()
        assert sum(f["trace_count"] for f in body["frames"]) == 1


class TestLayers:
    def test_catalog(self, client):
        r = client.get("/layers")
        assert r.status_code == 200
        layers = {entry["name"]: entry for entry in r.json()["layers"]}
        assert set(layers) == {"main_roads", "railways"}
        assert layers["railways"]["kind"] == "evidence"
        assert layers["railways"]["feature_count"] == 3

    def test_layer_body_equals_normalized_document(self, client):
        r = client.get("/layers/railways")
        expected = load_evidence_layer(LAYERS_DIR / "railways.geojson", "railways")
        assert r.content == expected.to_json().encode("utf-8")

    def test_unknown_layer_404(self, client):
        assert client.get("/layers/none").status_code == 404


class TestConcurrency:
    def test_reads_never_see_partial_state(self, client, log_id):
        errors = []

        def reader():
            for _ in range(20):
                r = client.get(f"/logs/{log_id}/map")
                if r.status_code != 200 or len(r.json()["nodes"]["features"]) != 3:
                    errors.append(r.status_code)

        def writer():
            for _ in range(5):
                with POSTAL_SAMPLE_CSV.open("rb") as fh:
                    client.post("/logs", files={"file": ("t.csv", fh, "text/csv")})

        threads = [threading.Thread(target=reader) for _ in range(3)]
        threads.append(threading.Thread(target=writer))
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []


def test_cors_headers_present(client):
    r = client.get("/layers", headers={"Origin": "http://localhost:5173"})
    assert r.headers.get("access-control-allow-origin") in ("*", "http://localhost:5173")


def test_get_endpoints_idempotent(client, log_id):
    for path, params in [
        (f"/logs/{log_id}/map", {"dimension": "city"}),
        (f"/logs/{log_id}/variants", {}),
        (f"/logs/{log_id}/frames", {"bin_s": 604800}),
        ("/layers/railways", {}),
    ]:
        first = client.get(path, params=params)
        second = client.get(path, params=params)
        assert first.content == second.content
