import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from comparison_lab.modelspace import DomainError
from comparison_lab.reporting import CheckConfig
from comparison_lab.spaces import FlatCone, KPod, P, Plane, Sphere, sample_triples
from comparison_lab.supportsense import (
    SampledFunction,
    classify_corner,
    comparison_gap_check,
    default_scales,
    dini_derivatives,
    dini_gate,
    geodesic_energy_check,
    sturm_ratio_check,
    sublemma_check,
    support_second_bound,
    verify_barrier,
)


def fn(g, a=-1.0, b=1.0, n=4096, exceptional=()):
    return SampledFunction.from_callable(g, a, b, n, exceptional)


# ---------------------------------------------------------------- SampledFunction


def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction([0, 1, 1], [0, 0, 0])
    with pytest.raises(ValueError):
        SampledFunction([0, 1, 2], [0, np.nan, 0])
    with pytest.raises(ValueError):
        SampledFunction([0, 1, 2], [0, 1, 0], exceptional=(0.0,))
    f = SampledFunction([0, 1, 2, 3], [0, 1, 0, 1], exceptional=(1.0000000000001,))
    assert f.exceptional == (1.0,)


def test_csv_roundtrip(tmp_path):
    f = fn(np.sin, 0, 3, 64, exceptional=(1.5,))
    f.to_csv(tmp_path / "f.csv")
    g = SampledFunction.from_csv(tmp_path / "f.csv")
    np.testing.assert_array_equal(f.t, g.t)
    np.testing.assert_array_equal(f.f, g.f)
    assert g.exceptional == (1.5,)


# ---------------------------------------------------------------- support-sense estimates


def test_second_bound_quadratic():
    f = fn(lambda t: t**2)
    for t in (-0.5, 0.0, 0.3):
        est = support_second_bound(f, t, "upper")
        assert est.estimate == pytest.approx(2.0, abs=1e-9)
        np.testing.assert_allclose(est.values, 2.0, atol=1e-9)


def test_second_bound_corners():
    up = support_second_bound(fn(np.abs), 0.0, "upper")
    assert up.estimate == math.inf and up.corner == "convex"
    tau = up.scales
    np.testing.assert_allclose(up.values, 2.0 / tau, rtol=1e-9)
    neg = fn(lambda t: -np.abs(t))
    est = support_second_bound(neg, 0.0, "upper")
    # window max of -2/tau: strongly negative, and more so as the window refines
    assert est.estimate == pytest.approx(-2.0 / tau[-4])
    assert support_second_bound(neg, 0.0, "lower").estimate == -math.inf


def test_second_bound_domain():
    f = fn(np.sin)
    with pytest.raises(DomainError):
        support_second_bound(f, -1.0)
    coarse = SampledFunction([0, 1, 2, 3, 4], [0, 1, 4, 9, 16])
    assert not support_second_bound(coarse, 2.0).conclusive


def test_window_invariant():
    f = fn(np.cosh)
    est = support_second_bound(f, 0.2, "upper")
    assert est.estimate == pytest.approx(est.values[np.isfinite(est.values)][-4:].max())
    est = support_second_bound(f, 0.2, "lower")
    assert est.estimate == pytest.approx(est.values[np.isfinite(est.values)][-4:].min())


def test_dini_examples():
    d = dini_derivatives(fn(np.abs), 0.0)
    assert (d.minus_min, d.plus_max) == pytest.approx((-1.0, 1.0))
    d = dini_derivatives(fn(lambda t: -np.abs(t)), 0.0)
    assert (d.minus_min, d.plus_max) == pytest.approx((1.0, -1.0))
    d = dini_derivatives(fn(np.sin), 0.0)
    assert (d.minus_min, d.plus_max) == pytest.approx((1.0, 1.0), abs=1e-3)


def test_dini_pair_invariant():
    d = dini_derivatives(fn(lambda t: np.sin(3 * t) + np.abs(t - 0.1)), 0.1)
    fin = np.isfinite(d.backward)
    assert d.minus_min <= d.backward[fin][-4:].min() + 1e-12
    assert d.plus_max >= d.forward[fin][-4:].max() - 1e-12


def test_corner_classification_ignores_nearby_corner():
    f = fn(lambda t: -np.abs(t), n=2048)
    pitch = f.pitch
    assert classify_corner(f, 0.0) == "concave"
    for m in (3, 5, 7, 9):
        assert classify_corner(f, -m * pitch) is None
    assert classify_corner(fn(np.sin), 0.2) is None


def test_dini_gate_smooth_point_passes():
    f = fn(lambda t: 1 + 0.5 * t**2)
    margin, _, gap = dini_gate(f, 0.25)
    assert margin < 0 and abs(gap) < 1e-6
    assert dini_gate(fn(np.abs), 0.0)[0] > 0
    assert dini_gate(fn(lambda t: -np.abs(t)), 0.0)[0] < 0


@pytest.mark.parametrize("g,d2,t", [(np.sin, lambda t: -np.sin(t), 1.0), (np.cosh, np.cosh, 0.4)])
def test_estimator_converges_quadratically(g, d2, t):
    f = fn(g, 0.0, 2.0, 8192)
    scales = f.pitch * 2.0 ** np.arange(9, 2, -1)
    est = support_second_bound(f, t, "upper", scales)
    err = np.abs(est.values - d2(t))
    slope = np.polyfit(np.log(scales), np.log(err), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


def test_estimator_exact_on_quadratic_all_scales():
    f = fn(lambda t: t**2, 0.0, 2.0, 8192)
    est = support_second_bound(f, 0.7, "upper")
    assert np.max(np.abs(est.values - 2.0)) <= 1e-8


# ---------------------------------------------------------------- barrier


def test_barrier_examples():
    assert verify_barrier(fn(np.sin, 0, 3), 1.0, "lower", 3.0).verdict == "pass"
    assert verify_barrier(fn(lambda t: t * (2 - t) / 2, 0, 2), 0.0, "lower", 2.0).verdict == "pass"
    sinh_comb = fn(lambda t: math.sinh(2) - np.sinh(t) - np.sinh(2 - t), 0, 2)
    assert verify_barrier(sinh_comb, -1.0, "lower", 2.0).verdict == "pass"


def test_barrier_gate_rejects_diameter():
    k = 1.0
    rep = verify_barrier(fn(lambda t: -np.sin(t), 0, math.pi), k, "lower", math.pi)
    assert rep.verdict == "inconclusive" and rep.phase == "gate" and rep.stats["rejected"]
    rep = verify_barrier(fn(np.sin, 0, math.pi), k, "lower", math.pi)
    assert rep.phase == "gate"


def test_barrier_phases():
    # f'' = 2 > 0 violates the hypothesis
    assert verify_barrier(fn(lambda t: t * (t - 2), 0, 2), 0.0).phase == "hypothesis"
    # concave corner at an exceptional point passes its Dini gate
    tent = fn(lambda t: 1 - np.abs(t - 1), 0, 2, exceptional=(1.0,))
    assert verify_barrier(fn(lambda t: 1 - np.abs(t - 1), 0, 2), 0.0).verdict == "pass"
    assert verify_barrier(tent, 0.0).verdict == "pass"
    vee = fn(lambda t: np.abs(t - 1) - 1, 0, 2, exceptional=(1.0,))
    rep = verify_barrier(vee, 0.0)
    assert rep.verdict == "fail" and rep.phase == "hypothesis"


def test_barrier_upper_direction():
    rep = verify_barrier(fn(lambda t: -np.sin(t), 0, 3), 1.0, "upper", 3.0)
    assert rep.verdict == "pass"
    assert verify_barrier(fn(lambda t: t * (t - 2), 0, 2), 0.0, "upper").verdict == "pass"


@st.composite
def concave_corpus(draw):
    """Nonnegative weighted tents (concave, zero at the ends) on [0, 1]."""
    peaks = draw(st.lists(st.integers(1, 15), min_size=1, max_size=4))
    weights = draw(st.lists(st.floats(0.1, 2.0), min_size=len(peaks), max_size=len(peaks)))
    return [(p / 16, w) for p, w in zip(peaks, weights)]


def _tents(spec):
    def g(t):
        out = np.zeros_like(t)
        for c, w in spec:
            out += w * np.minimum(t / c, (1 - t) / (1 - c))
        return out
    return g


@given(concave_corpus())
def test_concavity_bridge(spec):
    f = SampledFunction.from_callable(_tents(spec), 0.0, 1.0, 256)
    rep = verify_barrier(f, 0.0, "lower", 1.0)
    assert rep.verdict == "pass"
    v = f.f
    n = len(v)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    sel = (i + j) % 2 == 0
    mid = v[(i + j)[sel] // 2]
    assert np.all(mid >= (v[i[sel]] + v[j[sel]]) / 2 - 1e-7)


# ---------------------------------------------------------------- sturm pathway


def test_sturm_examples():
    assert sturm_ratio_check(fn(np.sin, 0, 3), 1.0).verdict == "pass"
    rep = sturm_ratio_check(fn(lambda t: t * (2 - t) / 2, 0, 2), 0.0)
    assert rep.verdict == "pass"
    assert sturm_ratio_check(fn(np.sinh, 0, 2), -1.0).verdict == "pass"
    assert sturm_ratio_check(fn(lambda t: 1 - np.abs(t - 1), 0, 2), 0.0).verdict == "inconclusive"


def test_sturm_z_closed_form():
    rep = sturm_ratio_check(fn(lambda t: t * (2 - t) / 2, 0, 2, 512), 0.0)
    t = np.array([r[0] for r in rep.curves["z"]])
    z = np.array([r[1] for r in rep.curves["z"]])
    np.testing.assert_allclose(z, -t**2 / 2, atol=1e-9)


SMOOTH = [
    (np.sin, 1.0, 3.0),
    (lambda t: t * (2 - t) / 2, 0.0, 2.0),
    (lambda t: math.sinh(2) - np.sinh(t) - np.sinh(2 - t), -1.0, 2.0),
    (lambda t: t**2, 0.0, 2.0),
    (lambda t: np.sin(2 * t), 1.0, 1.5),
    (lambda t: np.sin(0.5 * t), 1.0, 3.0),
    (lambda t: t * (3 - t) * (1 + t), 0.0, 3.0),
]


@pytest.mark.parametrize("g,k,l", SMOOTH)
def test_pathway_agreement(g, k, l):
    f = fn(g, 0.0, l)
    a = verify_barrier(f, k, "lower", l).verdict
    b = sturm_ratio_check(f, k).verdict
    assert "inconclusive" not in (a, b)
    assert a == b


# ---------------------------------------------------------------- sublemma


@st.composite
def piecewise_linear(draw):
    n = draw(st.integers(2, 6))
    slopes = draw(st.lists(st.integers(-8, 8), min_size=n, max_size=n))
    t0_piece = draw(st.integers(1, n - 1))
    return slopes, t0_piece


@given(piecewise_linear())
def test_sublemma_piecewise_linear(case):
    slopes, j = case
    n = len(slopes)
    knots = np.linspace(0.0, 1.0, n + 1)
    vals = np.concatenate([[0.0], np.cumsum(np.array(slopes) / n)])
    f = SampledFunction.from_callable(lambda t: np.interp(t, knots, vals), 0.0, 1.0, 64 * n)
    t0 = knots[j]
    res = sublemma_check(f, t0)
    # exact oracle: both sides equal the slope of the piece ending at t0
    assert res["minus_min"] == pytest.approx(slopes[j - 1], abs=1e-9)
    assert res["liminf_plus_max"] == pytest.approx(slopes[j - 1], abs=1e-9)
    assert res["margin"] <= 1e-7


def test_sublemma_fifty_function_corpus():
    rng = np.random.default_rng(50)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        slopes = rng.integers(-8, 9, n)
        knots = np.linspace(0.0, 1.0, n + 1)
        vals = np.concatenate([[0.0], np.cumsum(slopes / n)])
        f = SampledFunction.from_callable(lambda t: np.interp(t, knots, vals), 0.0, 1.0, 64 * n)
        for j in range(1, n):
            res = sublemma_check(f, knots[j])
            assert res["margin"] <= 1e-7
            assert res["minus_min"] == pytest.approx(slopes[j - 1], abs=1e-9)
            assert res["liminf_plus_max"] == pytest.approx(slopes[j - 1], abs=1e-9)


# ---------------------------------------------------------------- geodesic pipelines


def test_energy_sphere_pole_equator():
    s = Sphere(1.0)
    cfg = CheckConfig(kappa=1.0)
    path = s.geodesic(P(math.pi / 2, 0.0), P(math.pi / 2, 1.5))
    rep = geodesic_energy_check(s, cfg, P(0.0, 0.0), path)
    assert rep.verdict == "pass"
    assert rep.stats["lhs_max"] == pytest.approx(1.0, abs=1e-6)
    assert rep.stats["lhs_min"] == pytest.approx(1.0, abs=1e-6)


def test_energy_plane_equality():
    s = Plane(10.0)
    rep = geodesic_energy_check(s, CheckConfig(), P(0.3, 0.7), s.geodesic(P(-1.0, 0.0), P(1.0, 0.0)))
    assert rep.verdict == "pass"
    assert rep.stats["lhs_max"] == pytest.approx(1.0, abs=1e-6)
    assert rep.stats["lhs_min"] == pytest.approx(1.0, abs=1e-6)


def test_energy_tripod_fails_at_branch_point():
    t = KPod(3, 2.0)
    path = t.geodesic(P(0, 1.0), P(1, 1.0))
    rep = geodesic_energy_check(t, CheckConfig(), P(2, 1.0), path)
    assert rep.verdict == "fail"
    assert rep.witnesses[0].scale == pytest.approx(1.0)


def test_gap_examples():
    s = Sphere(1.0)
    rep = comparison_gap_check(s, CheckConfig(kappa=1.0), P(0.2, 0.1), s.geodesic(P(1.0, 2.0), P(0.7, 3.0)))
    assert rep.verdict == "pass" and abs(rep.stats["gap_min"]) < 1e-9
    pl = Plane(10.0)
    rep = comparison_gap_check(pl, CheckConfig(), P(0.2, 1.1), pl.geodesic(P(-1.0, 0.0), P(2.0, 0.5)))
    assert rep.verdict == "pass"
    t = KPod(3, 2.0)
    rep = comparison_gap_check(t, CheckConfig(), P(2, 1.0), t.geodesic(P(0, 1.0), P(1, 1.0)))
    assert rep.verdict == "fail"
    assert rep.stats["gap_min"] == pytest.approx(-1.0, abs=1e-9)
    assert rep.stats["gap_min_at"] == pytest.approx(1.0)


def test_gap_gate():
    s = Sphere(1.0)
    path = s.geodesic(P(0.1, 0.0), P(3.1, 0.0))
    assert comparison_gap_check(s, CheckConfig(kappa=4.0), P(1.0, 1.0), path).phase == "gate"


@pytest.mark.parametrize("space,kappa", [(Sphere(1.0), 1.0), (Plane(5.0), 0.0),
                                         (FlatCone(3 * math.pi / 2, 2.0), 0.0), (FlatCone(2 * math.pi, 2.0), 0.0)],
                         ids=["sphere", "plane", "cone3pi2", "cone2pi"])
def test_energy_pass_implies_gap_pass(space, kappa):
    cfg = CheckConfig(kappa=kappa, grid_exponent=10)
    checked = 0
    for p, q, r in sample_triples(space, 12, np.random.default_rng(3), 1.2 if kappa > 0 else None):
        for path in space.geodesics(q, r):
            if geodesic_energy_check(space, cfg, p, path).verdict != "pass":
                continue
            checked += 1
            assert comparison_gap_check(space, cfg, p, path).verdict == "pass"
    assert checked > 0
