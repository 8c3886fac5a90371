import io
import random

import pytest

import poishare as ps
from poishare.pipeline import EARTH_RADIUS_KM


GOOD_LINES = (
    "101\t2010-10-19T23:55:27Z\t30.23591\t-97.79594\t22847\n"
    "102\t2010-10-18T22:17:43Z\t30.26910\t-97.74939\t420315\n"
    "103\t2010-10-17T23:42:03Z\t30.25573\t-97.76338\t316637\n"
)


def test_parse_checkins_well_formed():
    records = ps.parse_checkins(io.StringIO(GOOD_LINES))
    assert len(records) == 3
    assert records[0].user_id == "101"
    assert records[0].latitude == pytest.approx(30.23591)
    assert records[0].timestamp.year == 2010


def test_parse_checkins_reports_bad_lines():
    text = GOOD_LINES + "104\t2010-10-16T00:00:00Z\t95.0\t-97.7\t1\nshort line\n"
    errors = []
    records = ps.parse_checkins(io.StringIO(text), errors=errors)
    assert len(records) == 3
    assert [lineno for lineno, _ in errors] == [4, 5]
    assert "latitude" in errors[0][1]


def test_parse_checkins_empty_stream():
    assert ps.parse_checkins(io.StringIO("")) == []
    with pytest.raises(ps.InputError):
        ps.parse_checkins(None)


def test_filter_bbox():
    records = ps.parse_checkins(io.StringIO(GOOD_LINES))
    whole_globe = ps.BoundingBox(-90, 90, -180, 180)
    assert ps.filter_bbox(records, whole_globe) == records
    nothing = ps.BoundingBox(0.0, 1.0, 0.0, 1.0)
    assert ps.filter_bbox(records, nothing) == []
    boundary = ps.BoundingBox(30.23591, 30.26910, -97.79594, -97.74939)
    assert len(ps.filter_bbox(records, boundary)) == 3  # inclusive edges
    with pytest.raises(ps.InputError):
        ps.BoundingBox(1.0, 1.0, 0.0, 1.0)


def _checkin(lat, lon, uid="u"):
    return ps.parse_checkins(
        io.StringIO(f"{uid}\t2010-01-01T00:00:00Z\t{lat}\t{lon}\tx\n")
    )[0]


def test_haversine_known_value():
    # quarter meridian
    assert ps.haversine_km(0.0, 0.0, 90.0, 0.0) == pytest.approx(
        EARTH_RADIUS_KM * 3.141592653589793 / 2, rel=1e-6
    )
    assert ps.haversine_km(10.0, 20.0, 10.0, 20.0) == 0.0


def test_cluster_locations_identical_points():
    points = [_checkin(30.0, -97.0) for _ in range(5)]
    centroids, assignment = ps.cluster_locations(points, 1)
    assert centroids == [(30.0, -97.0)]
    assert assignment == [0] * 5


def test_cluster_locations_two_clumps():
    clump_a = [_checkin(30.0 + d, -97.0) for d in (0.0, 0.001, 0.002)]
    clump_b = [_checkin(31.0 + d, -97.0) for d in (0.0, 0.001)]
    centroids, assignment = ps.cluster_locations(clump_a + clump_b, 2)
    assert len(centroids) == 2
    assert assignment == [0, 0, 0, 1, 1]
    assert centroids[0][0] == pytest.approx(30.001)
    assert centroids[1][0] == pytest.approx(31.0005)


def test_cluster_locations_exact_count_and_errors():
    rng = random.Random(61)
    points = [
        _checkin(30.0 + rng.random(), -97.0 + rng.random()) for _ in range(40)
    ]
    for target in (1, 7, 39, 40):
        centroids, assignment = ps.cluster_locations(points, target)
        assert len(centroids) == target
        assert len(set(assignment)) == target
    with pytest.raises(ps.InputError):
        ps.cluster_locations(points, 41)
    with pytest.raises(ps.InputError):
        ps.cluster_locations(points, 0)
    dupes = [_checkin(1.0, 1.0), _checkin(1.0, 1.0)]
    with pytest.raises(ps.InputError):
        ps.cluster_locations(dupes, 2)


def test_build_roads_examples():
    assert ps.build_roads([(0.0, 0.0), (0.0, 1.0)], knn=3) == ((0, 1),)
    collinear = [(0.0, 0.0), (0.0, 1.0), (0.0, 2.0)]
    assert ps.build_roads(collinear, knn=1) == ((0, 1), (1, 2))
    with pytest.raises(ps.InputError):
        ps.build_roads([(0.0, 0.0)], knn=1)
    with pytest.raises(ps.InputError):
        ps.build_roads(collinear, knn=0)


def test_build_roads_always_connected():
    rng = random.Random(62)
    for _ in range(20):
        n = rng.randint(2, 40)
        pts = [(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(n)]
        edges = ps.build_roads(pts, knn=rng.randint(1, 3))
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in edges:
            parent[find(u)] = find(v)
        assert len({find(i) for i in range(n)}) == 1


def test_synth_social_examples():
    assert ps.synth_social(5, 0.0, 0.0, seed=1).edges == ()
    assert ps.synth_social(2, 1.0, 0.0, seed=1).edges == ((0, 1),)
    g = ps.synth_social(500, 24.0, 8.0, seed=9)
    mean_degree = 2 * len(g.edges) / 500
    assert abs(mean_degree - 24.0) <= 2.4  # within 10%


def test_synth_social_valid_and_deterministic():
    rng = random.Random(63)
    for _ in range(20):
        m = rng.randint(1, 40)
        seed = rng.randrange(10**6)
        a = ps.synth_social(m, 5.0, 2.0, seed=seed)
        b = ps.synth_social(m, 5.0, 2.0, seed=seed)
        assert a == b
        seen = set()
        for u, v in a.edges:
            assert 0 <= u < v < m
            assert (u, v) not in seen
            seen.add((u, v))


def test_synth_instance_deterministic_and_valid():
    for mode, kw in (
        ("synthetic-random", dict(node_count=12, user_count=8, edge_prob=0.3)),
        ("gowalla-like", dict(node_count=30, knn=3)),
        ("reduction", dict(node_count=5, reduction_kind="vcp")),
        ("reduction", dict(node_count=4, reduction_kind="mobile", hops=2)),
    ):
        spec = ps.GenSpec(mode=mode, seed=17, **kw)
        inst = ps.synth_instance(spec)
        assert ps.validate(inst) == []
        again = ps.synth_instance(spec)
        assert ps.dumps_instance(inst) == ps.dumps_instance(again)
    with pytest.raises(ps.InputError):
        ps.synth_instance(ps.GenSpec(mode="nope"))


def test_gowalla_like_defaults_pass_validation():
    inst = ps.synth_instance(ps.GenSpec(mode="gowalla-like", seed=7))
    assert inst.node_count == inst.user_count == 92
    assert ps.validate(inst) == []


def test_reduction_mode_mobile_shape():
    spec = ps.GenSpec(mode="reduction", reduction_kind="mobile", node_count=3,
                      edge_prob=1.0, hops=1, seed=2)
    inst = ps.synth_instance(spec)
    # 3 users, 3 static edges, per user 1 tail node + 3 fan leaves
    assert inst.user_count == 3
    assert inst.node_count == 3 + 3 * (1 + 3)


def test_ingest_instance_end_to_end():
    rng = random.Random(64)
    lines = []
    for i in range(60):
        lat = 30.0 + rng.random() * 0.01
        lon = -97.0 - rng.random() * 0.01
        lines.append(f"u{i}\t2010-01-01T00:00:00Z\t{lat}\t{lon}\tloc{i}\n")
    records = ps.parse_checkins(io.StringIO("".join(lines)))
    bbox = ps.BoundingBox(29.9, 30.1, -97.1, -96.9)
    inst = ps.ingest_instance(records, bbox, cluster_target=10, knn=2,
                              degree_mean=3.0, degree_sigma=1.0, seed=5)
    assert inst.user_count == inst.node_count == 10
    assert ps.validate(inst) == []
    with pytest.raises(ps.InputError):
        ps.ingest_instance(records, ps.BoundingBox(0, 1, 0, 1), 5, 2, 3.0, 1.0, 5)
