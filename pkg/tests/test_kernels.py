import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from comparison_lab import _kernels
from comparison_lab._kernels import available_backends, get_backend
from comparison_lab.modelspace import fk, model_versine, side_from_versine, sn
from comparison_lab.spaces import GraphSpace, k_pod_graph

py = get_backend("python")
needs_cython = pytest.mark.skipif("cython" not in available_backends(), reason="compiled kernels not built")


def _backends():
    return [get_backend(b) for b in available_backends()]


def test_selected_backend_is_listed():
    assert _kernels.BACKEND in available_backends()
    with pytest.raises(ValueError):
        get_backend("fortran")


lengths = hnp.arrays(np.float64, 16, elements=st.floats(0.0, 1.4))


@needs_cython
@given(st.sampled_from([-2.0, -1.0, 0.0, 1e-9, 1.0, 2.0]), lengths, lengths, lengths)
def test_versine_backends_agree(k, a, b, c):
    cy = get_backend("cython")
    x_py = py.versine_batch(k, a, b, c)
    x_cy = cy.versine_batch(k, a, b, c)
    np.testing.assert_array_equal(np.isnan(x_py), np.isnan(x_cy))
    # condition number of (f(c) - f(|a-b|)) / (sn a sn b)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        cond = np.array([fk(k, ci) / (sn(k, ai) * sn(k, bi)) for ai, bi, ci in zip(a, b, c)])
    ok = ~np.isnan(x_py)
    bound = 1e-13 * np.abs(x_py[ok]) + 64 * np.finfo(float).eps * np.nan_to_num(cond[ok], nan=0.0, posinf=np.inf)
    assert np.all(np.abs(x_py - x_cy)[ok] <= bound)


@needs_cython
@given(st.sampled_from([-1.0, 0.0, 1.0]), lengths, lengths, hnp.arrays(np.float64, 16, elements=st.floats(0, 2)))
def test_side_backends_agree(k, a, b, x):
    cy = get_backend("cython")
    np.testing.assert_allclose(py.side_from_versine_batch(k, a, b, x), cy.side_from_versine_batch(k, a, b, x),
                               rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("mod", _backends(), ids=available_backends())
def test_batch_matches_scalar(mod):
    rng = np.random.default_rng(1)
    a = rng.uniform(0.05, 1.0, 200)
    b = rng.uniform(0.05, 1.0, 200)
    th = rng.uniform(0, math.pi, 200)
    x = 1 - np.cos(th)
    for k in (-1.0, 0.0, 1.0):
        c = mod.side_from_versine_batch(k, a, b, x)
        ref = [side_from_versine(k, ai, bi, xi) for ai, bi, xi in zip(a, b, x)]
        np.testing.assert_allclose(c, ref, rtol=1e-13)
        xs = mod.versine_batch(k, a, b, c)
        ref = [model_versine(k, ai, bi, ci) for ai, bi, ci in zip(a, b, c)]
        np.testing.assert_allclose(xs, ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("mod", _backends(), ids=available_backends())
def test_versine_flags_triangle_violation(mod):
    out = mod.versine_batch(0.0, np.array([1.0, 0.0, 1.0]), np.array([1.0, 1.0, 1.0]), np.array([2.5, 1.0, 2.0]))
    assert np.isnan(out[0]) and np.isnan(out[1]) and out[2] == pytest.approx(2.0)


@given(st.integers(2, 30), st.integers(0, 10_000))
def test_dijkstra_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, i + 1, float(rng.uniform(0.1, 1))) for i in range(n - 1)]
    for _ in range(n):
        u, v = rng.integers(0, n, 2)
        if u != v:
            edges.append((int(u), int(v), float(rng.choice([0.5, 1.0, rng.uniform(0.1, 2)]))))
    g = GraphSpace(n, edges)
    results = [m.dijkstra(g.indptr, g.indices, g.weights, 0) for m in _backends()]
    for d, pred in results[1:]:
        np.testing.assert_array_equal(d, results[0][0])
        np.testing.assert_array_equal(pred, results[0][1])


def test_dijkstra_matches_scipy():
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    g = k_pod_graph(4, 1.0, 0.05)
    m = csr_matrix((g.weights, g.indices, g.indptr), shape=(len(g.indptr) - 1,) * 2)
    ref = shortest_path(m, indices=0, directed=False)
    for mod in _backends():
        np.testing.assert_allclose(mod.dijkstra(g.indptr, g.indices, g.weights, 0)[0], ref, rtol=1e-14)


@pytest.mark.parametrize("name", ["second_differences", "one_sided_quotients"])
def test_difference_kernels_agree(name):
    t = np.sort(np.random.default_rng(2).uniform(0, 1, 300))
    f = np.cos(5 * t)
    centers = t[40:-40:7]
    taus = 0.2 * 2.0 ** -np.arange(6)
    outs = [np.asarray(getattr(m, name)(t, f, centers, taus)) for m in _backends()]
    for o in outs[1:]:
        np.testing.assert_array_equal(np.isnan(o), np.isnan(outs[0]))
        np.testing.assert_allclose(o, outs[0], rtol=1e-12, atol=1e-12)


def test_second_differences_exact_on_quadratic():
    t = np.linspace(-1, 1, 201)
    sd = py.second_differences(t, t**2, np.array([0.0, 0.3]), np.array([0.5, 0.1, 0.02]))
    np.testing.assert_allclose(sd, 2.0, rtol=1e-9)
