# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the O(N^2) hot kernels.

Must stay numerically interchangeable with `_numpy.py` (same algorithms,
same shift-pruning rules); the parity test suite enforces agreement.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow, sqrt, INFINITY

cnp.import_array()

CHI_FLOOR = 0.5


cdef inline double _chi(double t) noexcept nogil:
    cdef double u, a, b
    if t <= 0.5:
        return 0.0
    if t >= 1.0:
        return 1.0
    u = 2.0 * t - 1.0
    a = exp(-1.0 / u)
    b = exp(-1.0 / (1.0 - u))
    return a / (a + b)


cdef inline double _dchi(double t) noexcept nogil:
    cdef double u, a, b, da, db, s
    if t <= 0.5 or t >= 1.0:
        return 0.0
    u = 2.0 * t - 1.0
    a = exp(-1.0 / u)
    b = exp(-1.0 / (1.0 - u))
    da = a / (u * u)
    db = b / ((1.0 - u) * (1.0 - u))
    s = a + b
    return 2.0 * (da * b + a * db) / (s * s)


def chi_default(t):
    t = np.abs(np.asarray(t, dtype=float))
    flat = np.ascontiguousarray(t.ravel())
    cdef double[::1] tv = flat
    out = np.empty_like(flat)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(tv.shape[0]):
        ov[i] = _chi(tv[i])
    return out.reshape(t.shape)


def chi_default_deriv(t):
    t = np.asarray(t, dtype=float)
    flat = np.ascontiguousarray(t.ravel())
    cdef double[::1] tv = flat
    out = np.empty_like(flat)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(tv.shape[0]):
        ov[i] = _dchi(tv[i])
    return out.reshape(t.shape)


def velocity_sum(const double[:, ::1] targets, const double[:, ::1] src, const double[:, ::1] dsrc,
                 double alpha, double c_alpha, double eps):
    cdef Py_ssize_t M = targets.shape[0], S = src.shape[0]
    out = np.zeros((M, 2))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j
    cdef double dx, dy, r, K, ax, ay, floor_r, two_a, pref
    two_a = 2.0 * alpha
    pref = c_alpha / two_a
    floor_r = eps * 0.5
    with nogil:
        for i in range(M):
            ax = 0.0
            ay = 0.0
            for j in range(S):
                dx = targets[i, 0] - src[j, 0]
                dy = targets[i, 1] - src[j, 1]
                r = sqrt(dx * dx + dy * dy)
                if eps > 0.0:
                    if r <= floor_r:
                        continue
                    K = _chi(r / eps) * pref / pow(r, two_a)
                else:
                    K = pref / pow(r, two_a)
                ax += K * dsrc[j, 0]
                ay += K * dsrc[j, 1]
            ov[i, 0] = ax
            ov[i, 1] = ay
    return out


def dvelocity_sum(const double[:, ::1] targets, const double[:, ::1] tvecs, const double[:, ::1] src,
                  const double[:, ::1] dsrc, double alpha, double c_alpha, double eps):
    cdef Py_ssize_t M = targets.shape[0], S = src.shape[0]
    out = np.zeros((M, 2))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j
    cdef double dx, dy, r, dK, proj, ax, ay, floor_r, two_a, pref, t
    two_a = 2.0 * alpha
    pref = c_alpha / two_a
    floor_r = eps * 0.5
    with nogil:
        for i in range(M):
            ax = 0.0
            ay = 0.0
            for j in range(S):
                dx = targets[i, 0] - src[j, 0]
                dy = targets[i, 1] - src[j, 1]
                r = sqrt(dx * dx + dy * dy)
                if eps > 0.0:
                    if r <= floor_r:
                        continue
                    t = r / eps
                    dK = _dchi(t) / eps * pref / pow(r, two_a) - _chi(t) * c_alpha * pow(r, -1.0 - two_a)
                else:
                    if r <= 0.0:
                        continue
                    dK = -c_alpha * pow(r, -1.0 - two_a)
                proj = (dx * tvecs[i, 0] + dy * tvecs[i, 1]) / r
                ax += dK * proj * dsrc[j, 0]
                ay += dK * proj * dsrc[j, 1]
            ov[i, 0] = ax
            ov[i, 1] = ay
    return out


def point_polyline_dist(const double[:, ::1] points, const double[:, ::1] poly):
    cdef Py_ssize_t n = points.shape[0], S = poly.shape[0]
    dist = np.empty(n)
    seg = np.zeros(n, dtype=np.intp)
    par = np.zeros(n)
    cdef double[::1] dv = dist
    cdef Py_ssize_t[::1] sv = seg
    cdef double[::1] pv = par
    cdef Py_ssize_t i, j, jn
    cdef double ax, ay, bx, by, abx, aby, L2, t, px, py, d, best, bpar
    cdef Py_ssize_t bseg
    with nogil:
        for i in range(n):
            best = INFINITY
            bseg = 0
            bpar = 0.0
            for j in range(S):
                jn = (j + 1) % S
                ax = poly[j, 0]; ay = poly[j, 1]
                abx = poly[jn, 0] - ax; aby = poly[jn, 1] - ay
                L2 = abx * abx + aby * aby
                if L2 == 0.0:
                    t = 0.0
                else:
                    t = ((points[i, 0] - ax) * abx + (points[i, 1] - ay) * aby) / L2
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                px = points[i, 0] - (ax + t * abx)
                py = points[i, 1] - (ay + t * aby)
                d = sqrt(px * px + py * py)
                if d < best:
                    best = d
                    bseg = j
                    bpar = t
            dv[i] = best
            sv[i] = bseg
            pv[i] = bpar
    return dist, seg, par


cdef inline double _seg_pt(double ax, double ay, double bx, double by,
                           double px, double py) noexcept nogil:
    cdef double abx = bx - ax, aby = by - ay
    cdef double L2 = abx * abx + aby * aby
    cdef double t
    if L2 == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * abx + (py - ay) * aby) / L2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cdef double dx = px - (ax + t * abx), dy = py - (ay + t * aby)
    return sqrt(dx * dx + dy * dy)


cdef inline double _crossv(double ux, double uy, double vx, double vy) noexcept nogil:
    return ux * vy - uy * vx


def polyline_min_dist(const double[:, ::1] A, const double[:, ::1] B):
    cdef Py_ssize_t NA = A.shape[0], NB = B.shape[0]
    cdef Py_ssize_t i, j, inx, jn
    cdef double best = INFINITY
    cdef double p1x, p1y, p2x, p2y, q1x, q1y, q2x, q2y, d, d1, d2, d3, d4
    with nogil:
        for i in range(NA):
            inx = (i + 1) % NA
            p1x = A[i, 0]; p1y = A[i, 1]
            p2x = A[inx, 0]; p2y = A[inx, 1]
            for j in range(NB):
                jn = (j + 1) % NB
                q1x = B[j, 0]; q1y = B[j, 1]
                q2x = B[jn, 0]; q2y = B[jn, 1]
                d1 = _crossv(p2x - p1x, p2y - p1y, q1x - p1x, q1y - p1y)
                d2 = _crossv(p2x - p1x, p2y - p1y, q2x - p1x, q2y - p1y)
                d3 = _crossv(q2x - q1x, q2y - q1y, p1x - q1x, p1y - q1y)
                d4 = _crossv(q2x - q1x, q2y - q1y, p2x - q1x, p2y - q1y)
                if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                    best = 0.0
                    break
                d = _seg_pt(p1x, p1y, p2x, p2y, q1x, q1y)
                if d < best: best = d
                d = _seg_pt(p1x, p1y, p2x, p2y, q2x, q2y)
                if d < best: best = d
                d = _seg_pt(q1x, q1y, q2x, q2y, p1x, p1y)
                if d < best: best = d
                d = _seg_pt(q1x, q1y, q2x, q2y, p2x, p2y)
                if d < best: best = d
            if best == 0.0:
                break
    return best


def window_min_dist(const double[:, ::1] nodes, Py_ssize_t kmin, Py_ssize_t kmax):
    cdef Py_ssize_t N = nodes.shape[0]
    cdef Py_ssize_t d, i, j
    cdef double best = INFINITY
    cdef double dx, dy, v
    with nogil:
        for d in range(kmin, kmax + 1):
            for i in range(N):
                j = (i + d) % N
                dx = nodes[i, 0] - nodes[j, 0]
                dy = nodes[i, 1] - nodes[j, 1]
                v = sqrt(dx * dx + dy * dy)
                if v < best:
                    best = v
    return best


def tangent_pair_sup(const double[:, ::1] T, double ds, double beta):
    cdef Py_ssize_t N = T.shape[0]
    cdef Py_ssize_t d, i, j
    cdef double best = 0.0, num, dx, dy, v
    with nogil:
        for d in range(1, N // 2 + 1):
            num = 0.0
            for i in range(N):
                j = (i + d) % N
                dx = T[i, 0] - T[j, 0]
                dy = T[i, 1] - T[j, 1]
                v = sqrt(dx * dx + dy * dy)
                if v > num:
                    num = v
            v = num / pow(d * ds, beta)
            if v > best:
                best = v
    return best


def winding_inside(const double[:, ::1] points, const double[:, ::1] poly):
    cdef Py_ssize_t n = points.shape[0], S = poly.shape[0]
    out = np.zeros(n, dtype=bool)
    cdef cnp.uint8_t[::1] ov = out.view(np.uint8)
    cdef Py_ssize_t i, j, jn
    cdef double x, y, x0, y0, x1, y1, xi
    cdef bint inside
    with nogil:
        for i in range(n):
            x = points[i, 0]; y = points[i, 1]
            inside = 0
            for j in range(S):
                jn = (j + 1) % S
                x0 = poly[j, 0]; y0 = poly[j, 1]
                x1 = poly[jn, 0]; y1 = poly[jn, 1]
                if (y0 <= y) != (y1 <= y):
                    xi = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
                    if x < xi:
                        inside = not inside
            ov[i] = inside
    return out


def any_proper_crossing(const double[:, ::1] A, const double[:, ::1] B):
    cdef Py_ssize_t NA = A.shape[0], NB = B.shape[0]
    cdef Py_ssize_t i, j, inx, jn
    cdef double d1, d2, d3, d4
    cdef bint found = 0
    with nogil:
        for i in range(NA):
            inx = (i + 1) % NA
            for j in range(NB):
                jn = (j + 1) % NB
                d1 = _crossv(A[inx, 0] - A[i, 0], A[inx, 1] - A[i, 1],
                             B[j, 0] - A[i, 0], B[j, 1] - A[i, 1])
                d2 = _crossv(A[inx, 0] - A[i, 0], A[inx, 1] - A[i, 1],
                             B[jn, 0] - A[i, 0], B[jn, 1] - A[i, 1])
                d3 = _crossv(B[jn, 0] - B[j, 0], B[jn, 1] - B[j, 1],
                             A[i, 0] - B[j, 0], A[i, 1] - B[j, 1])
                d4 = _crossv(B[jn, 0] - B[j, 0], B[jn, 1] - B[j, 1],
                             A[inx, 0] - B[j, 0], A[inx, 1] - B[j, 1])
                if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                    found = 1
                    break
            if found:
                break
    return bool(found)


def self_intersects(const double[:, ::1] poly):
    cdef Py_ssize_t N = poly.shape[0]
    cdef Py_ssize_t i, j, inx, jn, jmax
    cdef double d1, d2, d3, d4
    cdef bint found = 0
    with nogil:
        for i in range(N - 1):
            inx = i + 1
            jmax = N - 1 if i == 0 else N
            for j in range(i + 2, jmax):
                jn = (j + 1) % N
                d1 = _crossv(poly[inx, 0] - poly[i, 0], poly[inx, 1] - poly[i, 1],
                             poly[j, 0] - poly[i, 0], poly[j, 1] - poly[i, 1])
                d2 = _crossv(poly[inx, 0] - poly[i, 0], poly[inx, 1] - poly[i, 1],
                             poly[jn, 0] - poly[i, 0], poly[jn, 1] - poly[i, 1])
                d3 = _crossv(poly[jn, 0] - poly[j, 0], poly[jn, 1] - poly[j, 1],
                             poly[i, 0] - poly[j, 0], poly[i, 1] - poly[j, 1])
                d4 = _crossv(poly[jn, 0] - poly[j, 0], poly[jn, 1] - poly[j, 1],
                             poly[inx, 0] - poly[j, 0], poly[inx, 1] - poly[j, 1])
                if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                    found = 1
                    break
            if found:
                break
    return bool(found)


def discrete_frechet_cyclic(const double[:, ::1] P, const double[:, ::1] Q):
    """Cyclic discrete Frechet distance, pruned by the |P0 - Qs| lower bound."""
    cdef Py_ssize_t N = P.shape[0], M = Q.shape[0]
    lb = np.hypot(P[0, 0] - np.asarray(Q[:, 0]), P[0, 1] - np.asarray(Q[:, 1]))
    order = np.argsort(lb, kind="stable").astype(np.intp)
    cdef Py_ssize_t[::1] ordv = order
    cdef double[::1] lbv = lb
    rows = np.empty((2, M + 1))
    cdef double[:, ::1] rv = rows
    cdef double best = INFINITY
    cdef Py_ssize_t oi, s, i, j, iq, jq, a, b, tmp
    cdef double dx, dy, d, m3, rowmin
    cdef bint aborted
    for oi in range(M):
        s = ordv[oi]
        if lbv[s] >= best:
            continue
        with nogil:
            a = 0
            b = 1
            aborted = 0
            # row i=0: running max along the first row
            dx = P[0, 0] - Q[s, 0]
            dy = P[0, 1] - Q[s, 1]
            rv[a, 0] = sqrt(dx * dx + dy * dy)
            for j in range(1, M + 1):
                jq = (j + s) % M
                dx = P[0, 0] - Q[jq, 0]
                dy = P[0, 1] - Q[jq, 1]
                d = sqrt(dx * dx + dy * dy)
                rv[a, j] = rv[a, j - 1] if rv[a, j - 1] > d else d
            for i in range(1, N + 1):
                iq = i % N
                dx = P[iq, 0] - Q[s, 0]
                dy = P[iq, 1] - Q[s, 1]
                d = sqrt(dx * dx + dy * dy)
                rv[b, 0] = rv[a, 0] if rv[a, 0] > d else d
                rowmin = rv[b, 0]
                for j in range(1, M + 1):
                    jq = (j + s) % M
                    dx = P[iq, 0] - Q[jq, 0]
                    dy = P[iq, 1] - Q[jq, 1]
                    d = sqrt(dx * dx + dy * dy)
                    m3 = rv[a, j]
                    if rv[a, j - 1] < m3:
                        m3 = rv[a, j - 1]
                    if rv[b, j - 1] < m3:
                        m3 = rv[b, j - 1]
                    rv[b, j] = m3 if m3 > d else d
                    if rv[b, j] < rowmin:
                        rowmin = rv[b, j]
                if rowmin >= best:
                    # every monotone path through this row already exceeds best
                    aborted = 1
                    break
                tmp = a
                a = b
                b = tmp
            d = INFINITY if aborted else rv[a, M]
        if d < best:
            best = d
    return float(best)


def maximal_op(f):
    af = np.abs(np.asarray(f, dtype=float))
    cdef Py_ssize_t N = af.shape[0]
    cdef Py_ssize_t W = N // 2
    ext = np.concatenate([af, af[:W]])
    extb = np.concatenate([af[-W:], af])
    out = np.zeros(N)
    cdef double[::1] ev = ext
    cdef double[::1] ebv = extb
    cdef double[::1] ov = out
    cdef Py_ssize_t i, k
    cdef double acc, best, avg
    with nogil:
        for i in range(N):
            best = 0.0
            acc = 0.0
            for k in range(W):
                acc += ev[i + k]
                avg = acc / (k + 1)
                if avg > best:
                    best = avg
            acc = 0.0
            for k in range(W):
                acc += ebv[W + i - k]
                avg = acc / (k + 1)
                if avg > best:
                    best = avg
            ov[i] = best
    return out
