from __future__ import annotations

import random

import pytest

from conftest import (
    DIST_MASHHAD_TEHRAN_KM, DIST_TEHRAN_SHIRAZ_KM, build_log, make_event,
)
from geoflow.discovery import DIM_CITY, DfgEdge, DurationStats, Variant, discover
from geoflow.metrics import (
    EdgeMetrics, NoDistanceError, UndefinedSpeedError, annotate_distances, assess,
    optimal_path, speed, speed_or_none, traffic_ranking,
)


def _edge(distance=None, mean=3600.0, freq=1):
    stats = DurationStats(min=mean, max=mean, mean=mean, median=mean)
    return DfgEdge("a", "b", freq, freq, stats, distance_km=distance)


class TestAnnotateDistances:
    def test_postal_sample_distances(self, postal_log):
        pmap = discover(postal_log, DIM_CITY, collapse_repeats=True)
        result = annotate_distances(pmap)
        assert result.missing == ()
        edges = result.map.edges
        assert edges[("Mashhad", "Tehran")].distance_km == pytest.approx(82.9, abs=0.1)
        assert edges[("Tehran", "Shiraz")].distance_km == pytest.approx(556.6, abs=0.5)
        assert edges[("Mashhad", "Tehran")].distance_km == pytest.approx(
            DIST_MASHHAD_TEHRAN_KM, rel=1e-9)
        assert edges[("Tehran", "Shiraz")].distance_km == pytest.approx(
            DIST_TEHRAN_SHIRAZ_KM, rel=1e-9)

    def test_same_coordinate_zero(self):
        from geoflow.geo import Coordinate
        c = Coordinate(10.0, 20.0)
        log = build_log([make_event("1", 1, city="A", coord=c),
                         make_event("1", 2, city="B", coord=c)])
        annotated = annotate_distances(discover(log, DIM_CITY)).map
        assert annotated.edges[("A", "B")].distance_km == 0.0

    def test_unlocated_node_reported(self):
        log = build_log([make_event("1", 1, city="A"),
                         make_event("1", 2, city="B")])
        result = annotate_distances(discover(log, DIM_CITY))
        assert result.missing == (("A", "B"),)
        assert result.map.edges[("A", "B")].distance_km is None

    def test_idempotent(self, postal_log):
        once = annotate_distances(discover(postal_log, DIM_CITY)).map
        twice = annotate_distances(once).map
        assert twice.edges == once.edges


class TestSpeed:
    def test_postal_sample_leg_speed(self, postal_log):
        pmap = annotate_distances(discover(postal_log, DIM_CITY)).map
        kmh = speed(pmap.edges[("Mashhad", "Tehran")])
        assert kmh == pytest.approx(4.56, abs=0.02)

    def test_zero_distance_gives_zero(self):
        assert speed(_edge(distance=0.0)) == 0.0

    def test_zero_duration_undefined(self):
        with pytest.raises(UndefinedSpeedError):
            speed(_edge(distance=10.0, mean=0.0))

    def test_missing_distance_undefined(self):
        with pytest.raises(UndefinedSpeedError):
            speed(_edge(distance=None))
        assert speed_or_none(_edge(distance=None)) is None

    def test_dimensionally_consistent(self):
        fast = speed(_edge(distance=100.0, mean=1800.0))
        slow = speed(_edge(distance=100.0, mean=3600.0))
        assert fast == 2 * slow

    def test_edge_metrics_from_edge(self):
        m = EdgeMetrics.from_edge(_edge(distance=82.9, mean=3600.0, freq=4))
        assert m.speed_kmh == pytest.approx(82.9)
        assert m.frequency == 4


def _variant(path, count, dist):
    return Variant(tuple(path), count, dist)


class TestOptimalPath:
    def test_picks_minimum_distance(self):
        vs = [_variant("ab", 10, 620.0), _variant("ac", 70, 500.0), _variant("ad", 20, 700.0)]
        assert optimal_path(vs).total_distance_km == 500.0

    def test_single_variant(self):
        v = _variant("ab", 1, 10.0)
        assert optimal_path([v]) is v

    def test_tie_broken_by_case_count(self):
        vs = [_variant("ab", 20, 500.0), _variant("ac", 70, 500.0)]
        assert optimal_path(vs).case_count == 70

    def test_no_distance_anywhere_rejected(self):
        with pytest.raises(NoDistanceError):
            optimal_path([_variant("ab", 5, None)])

    def test_scaling_invariance(self):
        rng = random.Random(2)
        vs = [_variant(f"p{i}", rng.randint(1, 9), rng.uniform(10, 900)) for i in range(8)]
        base = optimal_path(vs).path
        scaled = [Variant(v.path, v.case_count, v.total_distance_km * 3.5) for v in vs]
        assert optimal_path(scaled).path == base


class TestTrafficRanking:
    def test_top_one(self):
        vs = [_variant("ab", 20, None), _variant("ac", 70, None), _variant("ad", 10, None)]
        assert traffic_ranking(vs, 1)[0].case_count == 70

    def test_k_beyond_length_returns_all(self):
        vs = [_variant("ab", 2, None), _variant("ac", 1, None)]
        assert len(traffic_ranking(vs, 10)) == 2

    def test_empty_input(self):
        assert traffic_ranking([], 3) == []

    def test_k_zero_rejected(self):
        with pytest.raises(ValueError):
            traffic_ranking([], 0)

    def test_shuffle_invariant(self):
        rng = random.Random(9)
        vs = [_variant(f"p{i}", rng.randint(1, 5), rng.choice([None, 100.0, 200.0]))
              for i in range(10)]
        baseline = traffic_ranking(vs, 10)
        for _ in range(5):
            shuffled = vs[:]
            rng.shuffle(shuffled)
            assert traffic_ranking(shuffled, 10) == baseline


class TestAssess:
    def test_postal_sample_single_assessment(self, postal_log):
        results = assess(postal_log, DIM_CITY)
        assert len(results) == 1
        a = results[0]
        assert a.rank_by_distance == 1 and a.rank_by_traffic == 1
        assert a.total_distance_km == pytest.approx(639.5, abs=0.6)
        # transit only: Mashhad->Tehran plus Tehran->Shiraz legs
        assert a.total_mean_duration_s == pytest.approx(65460 + 65220)

    def test_empty_log(self):
        assert assess(build_log([]), DIM_CITY) == []

    def test_ranks_are_permutations(self):
        events = []
        seq = 0
        # three routes with different traffic and lengths
        from geoflow.geo import Coordinate
        coords = {"A": Coordinate(30, 50), "B": Coordinate(31, 50),
                  "C": Coordinate(35, 55), "D": Coordinate(30.5, 50)}
        routes = [("ABD", 5), ("ACD", 3), ("AD", 1)]
        for route, n in routes:
            for i in range(n):
                for city in route:
                    seq += 1
                    events.append(make_event(f"{route}{i}", seq, city=city,
                                             minutes=seq, coord=coords[city]))
        results = assess(build_log(events), DIM_CITY)
        k = len(results)
        assert sorted(a.rank_by_distance for a in results) == list(range(1, k + 1))
        assert sorted(a.rank_by_traffic for a in results) == list(range(1, k + 1))
        by_traffic = [a.variant.case_count for a in results]
        assert by_traffic == sorted(by_traffic, reverse=True)
