import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from comparison_lab.modelspace import (
    DomainError,
    Kappa,
    comparison_point_distance,
    cs,
    expansion_coefficients,
    fk,
    fk_inverse,
    model_angle,
    model_functions,
    model_side,
    model_versine,
    sn,
)

# Values computed with mpmath at 40 digits.
SINH1 = 1.1752011936438014
COTH1 = 1.3130352854993313
COSH1_M1 = 0.5430806348152437
ACOS06 = 0.9272952180016122
HALF_SQRT3 = 0.8660254037844386

ks = st.sampled_from([-4.0, -1.0, -1e-6, 0.0, 1e-6, 1.0, 4.0])
thetas = st.floats(0.0, math.pi)


def _lengths(k):
    hi = 0.45 * Kappa(k).diameter if k > 0 else 3.0
    return st.floats(1e-3, hi)


# ---------------------------------------------------------------- examples


def test_model_functions_examples():
    assert model_functions(0.0, 2.0) == pytest.approx((2.0, 0.5, 2.0))
    s, c, f = model_functions(1.0, math.pi / 2)
    assert s == pytest.approx(1.0) and c == pytest.approx(0.0, abs=1e-15) and f == pytest.approx(1.0)
    assert model_functions(-1.0, 1.0) == pytest.approx((SINH1, COTH1, COSH1_M1), rel=1e-14)


def test_model_functions_ct_absent_at_zero():
    assert model_functions(1.0, 0.0).ct is None


def test_diameter_rejection():
    with pytest.raises(DomainError):
        model_functions(1.0, math.pi)
    with pytest.raises(DomainError):
        model_functions(1.0, math.pi * (1 - 1e-12))
    model_functions(1.0, math.pi * (1 - 1e-8))
    assert Kappa(0.0).diameter == math.inf and Kappa(-2.0).admits(1e6)


def test_model_side_examples():
    assert model_side(0.0, 3.0, 4.0, math.pi / 2) == pytest.approx(5.0, rel=1e-14)
    assert model_side(1.0, math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2, rel=1e-14)
    assert model_side(-1.0, 1.0, 1.0, math.pi) == pytest.approx(2.0, rel=1e-14)


def test_model_side_rejects_diameter_output():
    with pytest.raises(DomainError):
        model_side(1.0, math.pi / 2, math.pi / 2, math.pi)
    # sides below the diameter can still close up past it: the side wraps
    assert model_side(1.0, 2.0, 2.0, math.pi) == pytest.approx(2 * math.pi - 4.0, rel=1e-12)


def test_model_angle_examples():
    assert model_angle(0.0, 3.0, 5.0, 4.0) == pytest.approx(ACOS06, rel=1e-14)
    assert model_angle(0.0, 1.0, 2.0, 3.0) == pytest.approx(math.pi, rel=1e-15)
    assert model_angle(1.0, math.pi / 2, math.pi / 2, math.pi / 2) == pytest.approx(math.pi / 2, rel=1e-14)


def test_model_angle_errors():
    with pytest.raises(DomainError):
        model_angle(0.0, 1.0, 1.0, 2.5)
    with pytest.raises(DomainError):
        model_angle(0.0, 0.0, 1.0, 1.0)


def test_rounding_excursion_is_clamped():
    a, b = 0.1, 0.2
    assert model_angle(0.0, a, b, a + b) == pytest.approx(math.pi)
    assert model_angle(0.0, a, b, 0.30000000000000004) == pytest.approx(math.pi)
    assert model_versine(0.0, a, b, abs(a - b) * (1 - 1e-15)) == 0.0


def test_comparison_point_distance_examples():
    assert comparison_point_distance(0.0, 1.0, 1.0, 1.0, 0.5) == pytest.approx(HALF_SQRT3, rel=1e-14)
    h = math.pi / 2
    assert comparison_point_distance(1.0, h, h, h, math.pi / 4) == pytest.approx(h, rel=1e-14)
    for k in (-1.0, 0.0, 1.0):
        assert comparison_point_distance(k, 0.7, 1.0, 0.9, 0.0) == 0.7
        assert comparison_point_distance(k, 0.7, 1.0, 0.9, 0.9) == pytest.approx(1.0, rel=1e-12)


def test_expansion_examples():
    e = expansion_coefficients(0.0, 2.0, math.pi / 2)
    assert (e.c0, e.c1, e.c2) == pytest.approx((2.0, 0.0, 0.25), abs=1e-15)
    e = expansion_coefficients(0.0, 2.0, 0.0)
    assert (e.c0, e.c1, e.c2) == pytest.approx((2.0, -1.0, 0.0), abs=1e-15)
    for th in (0.0, 0.4, 1.3, math.pi):
        e = expansion_coefficients(1.0, math.pi / 2, th)
        assert (e.f0, e.f1, e.f2) == pytest.approx((1.0, -math.cos(th), 0.0), abs=1e-15)
    with pytest.raises(DomainError):
        expansion_coefficients(0.0, 0.0, 1.0)


# ---------------------------------------------------------------- properties


@given(ks, st.floats(0.0, 3.0))
def test_pythagorean_identity(k, rho):
    assume(Kappa(k).admits(rho))
    # cancellation between terms of size cs^2 limits the absolute accuracy
    scale = max(1.0, cs(k, rho) ** 2)
    assert cs(k, rho) ** 2 + k * sn(k, rho) ** 2 == pytest.approx(1.0, abs=1e-12 * scale)


@given(ks, st.floats(0.01, 2.5))
def test_fk_derivative_is_sn(k, rho):
    assume(Kappa(k).admits(rho + 1e-4))
    h = 1e-5
    assert (fk(k, rho + h) - fk(k, rho - h)) / (2 * h) == pytest.approx(sn(k, rho), abs=1e-8)


@given(ks, st.floats(0.0, 2.5))
def test_fk_inverse_roundtrip(k, rho):
    assume(Kappa(k).admits(rho))
    assert fk_inverse(k, fk(k, rho)) == pytest.approx(rho, rel=1e-9, abs=1e-12)


@given(ks, st.data())
def test_model_side_symmetric_and_monotone(k, data):
    a = data.draw(_lengths(k))
    b = data.draw(_lengths(k))
    t1, t2 = sorted((data.draw(thetas), data.draw(thetas)))
    assert model_side(k, a, b, t1) == model_side(k, b, a, t1)
    assert model_side(k, a, b, t1) <= model_side(k, a, b, t2) + 1e-12


@given(ks, st.data())
def test_degenerate_exactness(k, data):
    a = data.draw(_lengths(k))
    b = data.draw(_lengths(k))
    assert model_side(k, a, b, 0.0) == pytest.approx(abs(a - b), abs=1e-9)
    assert model_side(k, a, b, math.pi) == pytest.approx(a + b, rel=1e-12)


@given(st.floats(-1.0, 1.0), st.floats(0.05, 1.2), st.floats(0.05, 1.2), st.floats(0.01, math.pi - 0.01))
def test_inverse_consistency(k, a, b, theta):
    c = model_side(k, a, b, theta)
    assert model_angle(k, a, b, c) == pytest.approx(theta, abs=1e-9)


@given(st.floats(0.1, 2.0), st.floats(0.1, 2.0), st.floats(0.0, math.pi))
def test_k_continuity(a, b, theta):
    base = model_side(0.0, a, b, theta)
    for k in (-1e-6, 1e-6):
        assert model_side(k, a, b, theta) == pytest.approx(base, abs=1e-5)
        assert fk(k, a) == pytest.approx(fk(0.0, a), abs=1e-5)
        assert sn(k, a) == pytest.approx(sn(0.0, a), abs=1e-5)


def _expansion_ratios(k, a, theta):
    e = expansion_coefficients(k, a, theta)
    out = []
    for j in range(3, 13):
        t = 2.0 ** -j
        out.append(abs(model_side(k, a, t, theta) - e.distance(t)) / t**3)
    return np.array(out)


@pytest.mark.parametrize("k", [-1.0, 0.0, 1.0])
@pytest.mark.parametrize("a", [0.3, 1.0, 2.0])
def test_expansion_residual_is_cubic(k, a):
    for theta in np.linspace(0.0, math.pi, 7):
        r = _expansion_ratios(k, a, theta)
        assert np.all(np.isfinite(r))
        # bounded: the finest ratios do not grow beyond the coarse ones
        assert r[-1] <= 2 * r[:3].max() + 1e-3


@pytest.mark.parametrize("k", [-1.0, 0.0, 1.0])
def test_energy_form_matches_distance_form(k):
    a = 0.8
    for theta in np.linspace(0.2, math.pi - 0.2, 5):
        e = expansion_coefficients(k, a, theta)
        for t in (1e-3, 2e-3):
            exact = fk(k, model_side(k, a, t, theta))
            assert e.energy(t) == pytest.approx(exact, abs=5 * t**3)
            assert fk(k, e.distance(t)) == pytest.approx(exact, abs=5 * t**3)
