# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: graph shortest paths, batched model trigonometry and
windowed difference quotients. Mirrors ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sinh, asin, asinh, sqrt, fabs, NAN, INFINITY
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

cdef double SERIES_CUTOFF = 1e-8
cdef double CLAMP = 1e-12
cdef double EPS = 2.220446049250313e-16


# ---------------------------------------------------------------- heap

cdef struct HeapItem:
    double key
    Py_ssize_t node

cdef inline bint _less(HeapItem a, HeapItem b) nogil:
    return a.key < b.key or (a.key == b.key and a.node < b.node)

cdef inline void _sift_up(HeapItem* h, Py_ssize_t i) nogil:
    cdef HeapItem item = h[i]
    cdef Py_ssize_t parent
    while i > 0:
        parent = (i - 1) >> 1
        if _less(item, h[parent]):
            h[i] = h[parent]
            i = parent
        else:
            break
    h[i] = item

cdef inline void _sift_down(HeapItem* h, Py_ssize_t n, Py_ssize_t i) nogil:
    cdef HeapItem item = h[i]
    cdef Py_ssize_t child
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and _less(h[child + 1], h[child]):
            child += 1
        if _less(h[child], item):
            h[i] = h[child]
            i = child
        else:
            break
    h[i] = item


def dijkstra(indptr, indices, weights, Py_ssize_t source):
    """Single-source shortest paths on a CSR graph with positive weights.

    Ties between equal-length predecessors resolve to the smallest vertex id.
    """
    cdef const long long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    dist_arr = np.full(n, np.inf)
    pred_arr = np.full(n, -1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef long long[::1] pred = pred_arr
    cdef unsigned char* done = <unsigned char*> malloc(n if n > 0 else 1)
    cdef Py_ssize_t cap = 64, size = 0
    cdef HeapItem* heap = <HeapItem*> malloc(cap * sizeof(HeapItem))
    cdef HeapItem top, item
    cdef Py_ssize_t u, v, e
    cdef double nd
    if done == NULL or heap == NULL:
        free(done); free(heap)
        raise MemoryError()
    with nogil:
        for u in range(n):
            done[u] = 0
        dist[source] = 0.0
        heap[0].key = 0.0
        heap[0].node = source
        size = 1
        while size > 0:
            top = heap[0]
            size -= 1
            if size > 0:
                heap[0] = heap[size]
                _sift_down(heap, size, 0)
            u = top.node
            if done[u]:
                continue
            done[u] = 1
            for e in range(ip[u], ip[u + 1]):
                v = ix[e]
                nd = top.key + w[e]
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = u
                    if size == cap:
                        cap *= 2
                        heap = <HeapItem*> realloc(heap, cap * sizeof(HeapItem))
                        if heap == NULL:
                            break
                    item.key = nd
                    item.node = v
                    heap[size] = item
                    size += 1
                    _sift_up(heap, size - 1)
                elif nd == dist[v] and u < pred[v]:
                    pred[v] = u
            if heap == NULL:
                break
    free(done)
    if heap == NULL:
        raise MemoryError()
    free(heap)
    return dist_arr, pred_arr


# ---------------------------------------------------------------- model trig

cdef inline double _sn(double k, double r) nogil:
    cdef double s
    if fabs(k) * r * r < SERIES_CUTOFF:
        return r * (1.0 - k * r * r / 6.0)
    if k > 0:
        s = sqrt(k)
        return sin(s * r) / s
    s = sqrt(-k)
    return sinh(s * r) / s

cdef inline double _fk(double k, double r) nogil:
    cdef double s
    if fabs(k) * r * r < SERIES_CUTOFF:
        return 0.5 * r * r * (1.0 - k * r * r / 12.0)
    if k > 0:
        s = sin(0.5 * sqrt(k) * r)
        return 2.0 * s * s / k
    s = sinh(0.5 * sqrt(-k) * r)
    return 2.0 * s * s / -k

cdef inline double _fk_inverse(double k, double y) nogil:
    cdef double s
    if y < 0:
        if y > -CLAMP:
            y = 0.0
        else:
            return NAN
    if fabs(k) * y < 0.5 * SERIES_CUTOFF:
        return sqrt(2.0 * y) * (1.0 + k * y / 12.0)
    if k > 0:
        s = k * y / 2.0
        if s >= 1.0:
            return NAN
        return 2.0 * asin(sqrt(s)) / sqrt(k)
    return 2.0 * asinh(sqrt(-k * y / 2.0)) / sqrt(-k)


def versine_batch(double k, a, b, c, double rtol=0.0):
    """Elementwise ``1 - cos`` of the S^2_k angle between sides a, b opposite c.

    Entries that are degenerate (a or b zero) or violate the triangle
    inequality beyond rounding come back as NaN.
    """
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64).ravel()
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64).ravel()
    cdef Py_ssize_t n = av.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double sa, sb, x, err, allow, excess, ai, bi, ci
    with nogil:
        for i in range(n):
            ai = av[i]; bi = bv[i]; ci = cv[i]
            if not (ai > 0 and bi > 0):
                out[i] = NAN
                continue
            sa = _sn(k, ai)
            sb = _sn(k, bi)
            x = (_fk(k, ci) - _fk(k, fabs(ai - bi))) / (sa * sb)
            if x >= 0.0 and x <= 2.0:
                out[i] = x
                continue
            err = (rtol + 4 * EPS) * (_sn(k, ci) * ci + _sn(k, ai + bi) * (ai + bi))
            allow = CLAMP + 4.0 * err / (sa * sb)
            excess = -x if x < 0 else x - 2.0
            if excess <= allow:
                out[i] = 0.0 if x < 0 else 2.0
            else:
                out[i] = NAN
    return out_arr.reshape(np.shape(a))


def side_from_versine_batch(double k, a, b, x):
    """Elementwise third side of the S^2_k triangle (NaN beyond the diameter)."""
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64).ravel()
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = av.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _fk_inverse(
                k, _fk(k, fabs(av[i] - bv[i])) + _sn(k, av[i]) * _sn(k, bv[i]) * xv[i])
    return out_arr.reshape(np.shape(a))


# ---------------------------------------------------------------- differences

cdef inline double _interp(const double[::1] t, const double[::1] f, double x, double slack) nogil:
    cdef Py_ssize_t n = t.shape[0], lo = 0, hi, mid
    cdef double w
    if x < t[0] - slack or x > t[n - 1] + slack:
        return NAN
    if x <= t[0]:
        return f[0]
    if x >= t[n - 1]:
        return f[n - 1]
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if t[mid] <= x:
            lo = mid
        else:
            hi = mid
    if x == t[lo]:
        return f[lo]
    w = (x - t[lo]) / (t[hi] - t[lo])
    return f[lo] + w * (f[hi] - f[lo])


def second_differences(t, f, centers, taus):
    """Matrix of (f(c+tau) + f(c-tau) - 2 f(c)) / tau^2 with linear interpolation.

    Rows follow ``centers``, columns follow ``taus``; NaN when c +- tau leaves
    the grid.
    """
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(taus, dtype=np.float64)
    cdef Py_ssize_t nc = cv.shape[0], ns = sv.shape[0], i, j
    out_arr = np.empty((nc, ns))
    cdef double[:, ::1] out = out_arr
    cdef double slack = 1e-12 * (tv[tv.shape[0] - 1] - tv[0])
    cdef double fc, tau
    with nogil:
        for i in range(nc):
            fc = _interp(tv, fv, cv[i], 1e300)
            for j in range(ns):
                tau = sv[j]
                out[i, j] = (_interp(tv, fv, cv[i] + tau, slack)
                             + _interp(tv, fv, cv[i] - tau, slack) - 2.0 * fc) / (tau * tau)
    return out_arr


def one_sided_quotients(t, f, centers, taus):
    """Backward and forward difference quotients at ``centers`` for each ``tau``."""
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] sv = np.ascontiguousarray(taus, dtype=np.float64)
    cdef Py_ssize_t nc = cv.shape[0], ns = sv.shape[0], i, j
    back_arr = np.empty((nc, ns))
    fwd_arr = np.empty((nc, ns))
    cdef double[:, ::1] back = back_arr
    cdef double[:, ::1] fwd = fwd_arr
    cdef double slack = 1e-12 * (tv[tv.shape[0] - 1] - tv[0])
    cdef double fc, tau
    with nogil:
        for i in range(nc):
            fc = _interp(tv, fv, cv[i], 1e300)
            for j in range(ns):
                tau = sv[j]
                back[i, j] = (fc - _interp(tv, fv, cv[i] - tau, slack)) / tau
                fwd[i, j] = (_interp(tv, fv, cv[i] + tau, slack) - fc) / tau
    return back_arr, fwd_arr
