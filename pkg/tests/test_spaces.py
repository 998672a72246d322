import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from comparison_lab.modelspace import DomainError
from comparison_lab.spaces import (
    CATALOG,
    FlatCone,
    FlatDisk,
    GraphSpace,
    HalfPlane,
    KPod,
    P,
    Plane,
    Segment,
    SpacePoint,
    SpaceSpecError,
    Sphere,
    SphericalCap,
    UnsupportedOperation,
    boundary_points,
    build_space,
    k_pod_graph,
    point_from_json,
    sample_triples,
    subdivide,
)

# mpmath: sqrt(2 - 2 cos(3 pi / 4))
CONE_CHORD = 1.8477590650225735

ANALYTIC = [
    Plane(1.0),
    HalfPlane(1.0),
    FlatDisk(1.0),
    Segment(1.0),
    Sphere(1.0),
    SphericalCap(1.0, math.pi / 2),
    FlatCone(3 * math.pi / 2, 1.0),
    FlatCone(5 * math.pi / 2, 1.0),
    KPod(3, 1.0),
]


def _ids(spaces):
    return [f"{s.kind}-{i}" for i, s in enumerate(spaces)]


# ---------------------------------------------------------------- examples


def test_tripod_distance():
    s = build_space({"kind": "k_pod", "params": {"m": 3, "length": 10.0}})
    assert s.distance(P(0, 2.0), P(1, 3.0)) == 5.0
    assert s.distance(P(0, 2.0), P(0, 3.0)) == 1.0


def test_cone_distances():
    c = FlatCone(3 * math.pi / 2)
    assert c.distance(P(1.0, 0.0), P(1.0, 3 * math.pi / 4)) == pytest.approx(CONE_CHORD, rel=1e-14)
    c = FlatCone(5 * math.pi / 2)
    assert c.distance(P(1.0, 0.0), P(1.0, 5 * math.pi / 4)) == pytest.approx(2.0, rel=1e-15)
    paths = c.geodesics(P(1.0, 0.0), P(1.0, 5 * math.pi / 4))
    assert all(p.singular == (1.0,) for p in paths)


def test_graph_shortcut():
    g = GraphSpace(3, [(0, 1, 0.3), (1, 2, 0.4), (0, 2, 0.8)])
    assert g.distance(P(0), P(2)) == pytest.approx(0.7)


def test_segment_geodesic_samples():
    path = Segment(1.0).geodesic(P(0.2), P(0.9), step=0.1)
    assert path.length == pytest.approx(0.7)
    np.testing.assert_allclose([p.coords[0] for p in path.points], np.arange(2, 10) / 10, atol=1e-12)


def test_tripod_geodesic_through_center():
    path = KPod(3, 1.0).geodesic(P(0, 1.0), P(1, 1.0))
    assert path.length == 2.0 and path.singular == (1.0,)
    assert path.point_at(1.0)[1].coords[1] == pytest.approx(0.0)


def test_sphere_geodesic_distance():
    s = Sphere(1.0)
    path = s.geodesic(P(0.0, 0.0), P(2.0, 0.3))
    assert path.length == pytest.approx(2.0)
    assert s.distance(path.point_at(0.5)[1], path.point_at(1.5)[1]) == pytest.approx(1.0, abs=1e-12)
    assert s.distance(P(0.0, 0.0), P(math.pi / 2, 1.0)) == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        s.geodesic(P(0.0, 0.0), P(math.pi, 0.0))


def test_boundary_points():
    assert [p.coords for p in boundary_points(Segment(1.0), 5)] == [(0.0,), (1.0,)]
    rim = boundary_points(FlatDisk(1.0), 8)
    assert len(rim) == 8
    angles = sorted(math.atan2(p.coords[1], p.coords[0]) % (2 * math.pi) for p in rim)
    np.testing.assert_allclose(np.diff(angles), math.pi / 4, atol=1e-12)
    hp = boundary_points(HalfPlane(2.0), 5)
    assert all(p.coords[1] == 0 and abs(p.coords[0]) <= 2.0 for p in hp)
    assert boundary_points(Sphere(1.0), 4) == []


def test_subdivide_single_edge():
    g = subdivide(GraphSpace(2, [(0, 1, 1.0)]), 0.25)
    assert g.n == 5
    assert g.distance(P(0), P(1)) == 1.0
    assert g.pitch == 0.25


def test_subdivide_triangle_preserves_distances():
    g = GraphSpace(3, [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)])
    s = subdivide(g, 0.5)
    for u in range(3):
        for v in range(3):
            assert s.distance(P(u), P(v)) == pytest.approx(g.distance(P(u), P(v)), abs=1e-12)


def _tripod_coords(m, pieces, v):
    """Analytic (ray, radius) of vertex v of k_pod_graph(m, 1, 1/pieces)."""
    if v == 0:
        return P(0, 0.0)
    if v <= m:
        return P(v - 1, 1.0)
    e, j = divmod(v - (m + 1), pieces - 1)
    return P(e, (j + 1) / pieces)


def test_subdivided_tripod_converges_to_analytic():
    tri = KPod(3, 1.0)
    for pieces in (4, 8, 16):
        g = k_pod_graph(3, 1.0, 1.0 / pieces)
        for u in range(0, g.n, 3):
            for v in range(0, g.n, 5):
                exact = tri.distance(_tripod_coords(3, pieces, u), _tripod_coords(3, pieces, v))
                assert g.distance(P(u), P(v)) == pytest.approx(exact, abs=1e-12)


def test_subdivide_rejects_analytic():
    with pytest.raises(UnsupportedOperation):
        subdivide(Plane(1.0), 0.1)


def test_build_space_errors():
    with pytest.raises(SpaceSpecError):
        build_space({"kind": "torus"})
    with pytest.raises(SpaceSpecError):
        build_space({"kind": "flat_cone"})
    with pytest.raises(SpaceSpecError):
        build_space({"kind": "sphere", "params": {"radius": 1}})
    with pytest.raises(ValueError):
        build_space({"kind": "segment", "params": {"length": -1}})
    with pytest.raises(ValueError):
        build_space({"kind": "graph", "params": {"n_vertices": 4, "edges": [[0, 1, 1.0], [2, 3, 1.0]]}})


def test_build_space_roundtrip():
    for s in ANALYTIC:
        again = build_space(s.to_spec())
        assert again.to_spec() == s.to_spec()
    assert set(CATALOG) >= {"sphere", "flat_cone", "k_pod", "segment", "half_plane", "flat_disk",
                            "spherical_cap", "graph", "double"}


def test_point_json_roundtrip():
    p = SpacePoint((1, 0.5), side=1)
    assert point_from_json(p.to_json()) == p
    assert point_from_json([0.1, 0.2]) == P(0.1, 0.2)


def test_segment_convention_note():
    assert Segment(4.0).convention_notes(1.0)
    assert not Segment(3.0).convention_notes(1.0)
    assert not Segment(4.0).convention_notes(0.0)


# ---------------------------------------------------------------- properties


def _triples(space, n, seed):
    return sample_triples(space, n, np.random.default_rng(seed), None)


@pytest.mark.parametrize("space", ANALYTIC, ids=_ids(ANALYTIC))
def test_metric_axioms(space):
    for p, q, r in _triples(space, 1000, 0):
        dpq, dqp = space.distance(p, q), space.distance(q, p)
        assert dpq == dqp
        assert dpq >= 0
        assert space.distance(p, p) == 0
        assert space.distance(p, r) <= dpq + space.distance(q, r) + 1e-9


def test_graph_metric_axioms_exact():
    g = k_pod_graph(4, 1.0, 0.1)
    for p, q, r in _triples(g, 1000, 1):
        assert g.distance(p, q) == g.distance(q, p)
        assert g.distance(p, r) <= g.distance(p, q) + g.distance(q, r) + 1e-12


@pytest.mark.parametrize("space", ANALYTIC, ids=_ids(ANALYTIC))
def test_geodesic_minimality(space):
    for _, q, r in _triples(space, 40, 2):
        if space.distance(q, r) == 0:
            continue
        try:
            paths = space.geodesics(q, r)
        except DomainError:
            continue
        for path in paths:
            t = np.linspace(0, path.length, 9)
            pts = [path.point_at(float(x))[1] for x in t]
            assert space.distance(pts[0], q) < 1e-9 and space.distance(pts[-1], r) < 1e-9
            for i in range(len(t)):
                for j in range(i + 1, len(t)):
                    assert space.distance(pts[i], pts[j]) == pytest.approx(t[j] - t[i], abs=1e-9)


def test_graph_geodesic_minimality():
    g = subdivide(GraphSpace(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]), 0.25)
    path_set = g.geodesics(P(0), P(2))
    assert len(path_set) == 2
    for path in path_set:
        pts = path.points
        for i, a in enumerate(pts):
            for j in range(i, len(pts)):
                assert g.distance(a, pts[j]) == pytest.approx(path.knots[j] - path.knots[i], abs=1e-12)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 2 * math.pi), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_cone_away_from_apex_is_planar(a1, a2, r1, r2):
    # inside a sector narrower than pi the cone unrolls isometrically
    c = FlatCone(5 * math.pi / 2)
    phi1 = a1 % (0.9 * math.pi)
    phi2 = a2 % (0.9 * math.pi)
    planar = math.hypot(r1 * math.cos(phi1) - r2 * math.cos(phi2), r1 * math.sin(phi1) - r2 * math.sin(phi2))
    assert c.distance(P(r1, phi1), P(r2, phi2)) == pytest.approx(planar, abs=1e-12)


@given(st.integers(0, 2), st.floats(0, 1), st.integers(0, 2), st.floats(0, 1))
def test_tripod_closed_form(i, a, j, b):
    d = KPod(3, 1.0).distance(P(i, a), P(j, b))
    assert d == pytest.approx(abs(a - b) if i == j else a + b, abs=1e-15)
