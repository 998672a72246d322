"""Reference implementations of the hot kernels (numpy + heapq).

Same signatures and semantics as the compiled ``_core`` module.
"""
import heapq

import numpy as np

SERIES_CUTOFF = 1e-8
CLAMP = 1e-12
EPS = 2.220446049250313e-16


def dijkstra(indptr, indices, weights, source):
    """Single-source shortest paths on a CSR graph with positive weights.

    Ties between equal-length predecessors resolve to the smallest vertex id.
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    heap = [(0.0, int(source))]
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    weights = np.asarray(weights, dtype=float).tolist()
    dl = dist.tolist()
    pl = pred.tolist()
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = d + weights[e]
            if nd < dl[v]:
                dl[v] = nd
                pl[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dl[v] and u < pl[v]:
                pl[v] = u
    return np.array(dl), np.array(pl, dtype=np.int64)


def _sn(k, r):
    r = np.asarray(r, dtype=float)
    small = np.abs(k) * r * r < SERIES_CUTOFF
    if k > 0:
        s = np.sqrt(k)
        out = np.sin(s * r) / s
    elif k < 0:
        s = np.sqrt(-k)
        out = np.sinh(s * r) / s
    else:
        out = r.copy()
    return np.where(small, r * (1.0 - k * r * r / 6.0), out)


def _fk(k, r):
    r = np.asarray(r, dtype=float)
    small = np.abs(k) * r * r < SERIES_CUTOFF
    if k > 0:
        out = 2.0 * np.sin(0.5 * np.sqrt(k) * r) ** 2 / k
    elif k < 0:
        out = 2.0 * np.sinh(0.5 * np.sqrt(-k) * r) ** 2 / -k
    else:
        out = 0.5 * r * r
    return np.where(small, 0.5 * r * r * (1.0 - k * r * r / 12.0), out)


def _fk_inverse(k, y):
    y = np.asarray(y, dtype=float)
    yc = np.where((y < 0) & (y > -CLAMP), 0.0, y)
    small = np.abs(k) * yc < 0.5 * SERIES_CUTOFF
    with np.errstate(invalid="ignore"):
        series = np.sqrt(2.0 * yc) * (1.0 + k * yc / 12.0)
        if k > 0:
            s = k * yc / 2.0
            out = np.where(s < 1.0, 2.0 * np.arcsin(np.sqrt(s)) / np.sqrt(k), np.nan)
        elif k < 0:
            out = 2.0 * np.arcsinh(np.sqrt(-k * yc / 2.0)) / np.sqrt(-k)
        else:
            out = series
    return np.where(small, series, out)


def versine_batch(k, a, b, c, rtol=0.0):
    """Elementwise ``1 - cos`` of the S^2_k angle between sides a, b opposite c.

    Entries that are degenerate (a or b zero) or violate the triangle
    inequality beyond rounding come back as NaN.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    sa = _sn(k, a)
    sb = _sn(k, b)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = (_fk(k, c) - _fk(k, np.abs(a - b))) / (sa * sb)
        err = (rtol + 4 * EPS) * (_sn(k, c) * c + _sn(k, a + b) * (a + b))
        allow = CLAMP + 4.0 * err / (sa * sb)
    excess = np.where(x < 0, -x, x - 2.0)
    ok = (excess <= allow) & (a > 0) & (b > 0)
    return np.where(ok, np.clip(x, 0.0, 2.0), np.nan)


def side_from_versine_batch(k, a, b, x):
    """Elementwise third side of the S^2_k triangle (NaN beyond the diameter)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    y = _fk(k, np.abs(a - b)) + _sn(k, a) * _sn(k, b) * np.asarray(x, dtype=float)
    return _fk_inverse(k, y)


def _interp(t, f, x):
    out = np.interp(x, t, f)
    return np.where((x < t[0] - 1e-12 * (t[-1] - t[0])) | (x > t[-1] + 1e-12 * (t[-1] - t[0])), np.nan, out)


def second_differences(t, f, centers, taus):
    """Matrix of (f(c+tau) + f(c-tau) - 2 f(c)) / tau^2 with linear interpolation.

    Rows follow ``centers``, columns follow ``taus``; NaN when c +- tau leaves
    the grid.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    c = np.asarray(centers, dtype=float)[:, None]
    tau = np.asarray(taus, dtype=float)[None, :]
    fc = np.interp(c, t, f)
    return (_interp(t, f, c + tau) + _interp(t, f, c - tau) - 2.0 * fc) / (tau * tau)


def one_sided_quotients(t, f, centers, taus):
    """Backward and forward difference quotients at ``centers`` for each ``tau``."""
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    c = np.asarray(centers, dtype=float)[:, None]
    tau = np.asarray(taus, dtype=float)[None, :]
    fc = np.interp(c, t, f)
    back = (fc - _interp(t, f, c - tau)) / tau
    fwd = (_interp(t, f, c + tau) - fc) / tau
    return back, fwd
