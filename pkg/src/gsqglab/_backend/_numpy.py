"""NumPy reference implementation of the O(N^2) hot kernels.

Mirrors the compiled extension in `_core.pyx`; both backends must produce
the same values up to floating-point reassociation (~1e-14 relative).
"""

import numpy as np

CHI_FLOOR = 0.5  # default cutoff vanishes on [0, CHI_FLOOR] (argument t = r/eps)


# ---------------------------------------------------------------------------
# default cutoff profile: C-infinity ramp, 0 on |t|<=1/2, 1 on |t|>=1
# ---------------------------------------------------------------------------

def _ramp(u):
    """Smooth 0->1 transition on u in [0,1] built from exp(-1/u) bumps."""
    u = np.asarray(u, dtype=float)
    a = np.zeros_like(u)
    b = np.zeros_like(u)
    m = u > 0.0
    a[m] = np.exp(-1.0 / u[m])
    m = u < 1.0
    b[m] = np.exp(-1.0 / (1.0 - u[m]))
    return a / (a + b)


def chi_default(t):
    t = np.abs(np.asarray(t, dtype=float))
    out = np.ones_like(t)
    lo = t <= CHI_FLOOR
    hi = t >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[mid] = _ramp(2.0 * t[mid] - 1.0)
    return out


def chi_default_deriv(t):
    """d(chi)/dt for t >= 0 (chi is even; callers pass radii)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mid = (t > CHI_FLOOR) & (t < 1.0)
    u = 2.0 * t[mid] - 1.0
    a = np.exp(-1.0 / u)
    b = np.exp(-1.0 / (1.0 - u))
    da = a / u**2
    db = b / (1.0 - u) ** 2
    out[mid] = 2.0 * (da * b + a * db) / (a + b) ** 2
    return out


# ---------------------------------------------------------------------------
# kernel sums (boundary-integral velocity and its tangential derivative)
# ---------------------------------------------------------------------------

def _kernel_values(r, alpha, c_alpha, eps):
    """K_eps(r) with the default cutoff; r may contain zeros when eps > 0."""
    K = np.zeros_like(r)
    if eps > 0.0:
        live = r > eps * CHI_FLOOR
        K[live] = chi_default(r[live] / eps) * c_alpha / (2.0 * alpha * r[live] ** (2.0 * alpha))
    else:
        K = c_alpha / (2.0 * alpha * r ** (2.0 * alpha))
    return K


def _kernel_radial_deriv(r, alpha, c_alpha, eps):
    """d/dr of K_eps(r) with the default cutoff."""
    out = np.zeros_like(r)
    if eps > 0.0:
        live = r > eps * CHI_FLOOR
        rl = r[live]
        t = rl / eps
        Kr = c_alpha / (2.0 * alpha * rl ** (2.0 * alpha))
        out[live] = chi_default_deriv(t) / eps * Kr - chi_default(t) * c_alpha * rl ** (-1.0 - 2.0 * alpha)
    else:
        out = -c_alpha * r ** (-1.0 - 2.0 * alpha)
    return out


def velocity_sum(targets, src, dsrc, alpha, c_alpha, eps):
    """sum_j K_eps(|x_i - p_j|) d_j for each target x_i.

    `src` are quadrature points on one source curve and `dsrc` the associated
    tangent-times-weight vectors; the caller applies strength and sign.
    """
    d = targets[:, None, :] - src[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    K = _kernel_values(r, alpha, c_alpha, eps)
    return K @ dsrc


def dvelocity_sum(targets, tvecs, src, dsrc, alpha, c_alpha, eps):
    """sum_j (grad K_eps(x_i - p_j) . t_i) d_j for each target x_i."""
    d = targets[:, None, :] - src[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    r = np.maximum(r, 1e-300)
    dK = _kernel_radial_deriv(r, alpha, c_alpha, eps)
    proj = (d[..., 0] * tvecs[:, None, 0] + d[..., 1] * tvecs[:, None, 1]) / r
    return (dK * proj) @ dsrc


# ---------------------------------------------------------------------------
# distances between polylines / within a polyline
# ---------------------------------------------------------------------------

def point_polyline_dist(points, poly):
    """Distance from each point to a closed polyline.

    Returns (dist, seg_index, seg_param); ties keep the smallest segment
    index (= smallest arclength location).
    """
    a = poly
    b = np.roll(poly, -1, axis=0)
    n = len(points)
    best = np.full(n, np.inf)
    bseg = np.zeros(n, dtype=np.intp)
    bpar = np.zeros(n)
    for i in range(len(poly)):
        ab = b[i] - a[i]
        L2 = ab @ ab
        if L2 == 0.0:
            t = np.zeros(n)
        else:
            t = np.clip(((points - a[i]) @ ab) / L2, 0.0, 1.0)
        proj = a[i] + t[:, None] * ab
        d = np.hypot(points[:, 0] - proj[:, 0], points[:, 1] - proj[:, 1])
        upd = d < best
        best[upd] = d[upd]
        bseg[upd] = i
        bpar[upd] = t[upd]
    return best, bseg, bpar


def _seg_seg_dist_batch(p1, p2, q1, q2):
    """Min distance between one segment (p1,p2) and many segments (q1,q2)."""
    cands = []
    for pts, poly_a, poly_b in ((q1, p1, p2), (q2, p1, p2)):
        ab = poly_b - poly_a
        L2 = ab @ ab
        t = np.clip(((pts - poly_a) @ ab) / (L2 if L2 else 1.0), 0.0, 1.0)
        proj = poly_a + t[:, None] * ab
        cands.append(np.hypot(pts[:, 0] - proj[:, 0], pts[:, 1] - proj[:, 1]))
    ab = q2 - q1
    L2 = (ab * ab).sum(axis=1)
    L2s = np.where(L2 == 0.0, 1.0, L2)
    for p in (p1, p2):
        t = np.clip(((p - q1) * ab).sum(axis=1) / L2s, 0.0, 1.0)
        proj = q1 + t[:, None] * ab
        cands.append(np.hypot(p[0] - proj[:, 0], p[1] - proj[:, 1]))
    d = np.minimum.reduce(cands)
    # proper crossings give distance 0
    pdir = np.broadcast_to(p2 - p1, q1.shape)
    d1 = _cross_rows(pdir, q1 - p1) * _cross_rows(pdir, q2 - p1)
    d2 = _cross_rows(ab, np.broadcast_to(p1, q1.shape) - q1) * _cross_rows(
        ab, np.broadcast_to(p2, q1.shape) - q1
    )
    d[(d1 < 0.0) & (d2 < 0.0)] = 0.0
    return d


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _cross_rows(U, V):
    return U[:, 0] * V[:, 1] - U[:, 1] * V[:, 0]


def polyline_min_dist(A, B):
    """Min distance between two closed polylines (0 if they cross)."""
    a1 = A
    a2 = np.roll(A, -1, axis=0)
    b1 = B
    b2 = np.roll(B, -1, axis=0)
    best = np.inf
    for i in range(len(A)):
        d = _seg_seg_dist_batch(a1[i], a2[i], b1, b2)
        m = d.min()
        if m < best:
            best = m
        if best == 0.0:
            break
    return best


def window_min_dist(nodes, kmin, kmax):
    """Min chord |z_i - z_{i+d}| over cyclic index offsets d in [kmin, kmax]."""
    best = np.inf
    for d in range(kmin, kmax + 1):
        r = np.roll(nodes, -d, axis=0)
        m = np.hypot(nodes[:, 0] - r[:, 0], nodes[:, 1] - r[:, 1]).min()
        if m < best:
            best = m
    return best


def tangent_pair_sup(T, ds, beta):
    """sup over node pairs of |T_i - T_j| / (cyclic arc distance)^beta."""
    N = len(T)
    best = 0.0
    for d in range(1, N // 2 + 1):
        r = np.roll(T, -d, axis=0)
        num = np.hypot(T[:, 0] - r[:, 0], T[:, 1] - r[:, 1]).max()
        v = num / (d * ds) ** beta
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# point-in-polygon and crossing tests
# ---------------------------------------------------------------------------

def winding_inside(points, poly):
    """Even-odd inside test for each point against a closed polygon."""
    x = points[:, 0]
    y = points[:, 1]
    x0 = poly[:, 0]
    y0 = poly[:, 1]
    x1 = np.roll(x0, -1)
    y1 = np.roll(y0, -1)
    inside = np.zeros(len(points), dtype=bool)
    for i in range(len(poly)):
        cond = (y0[i] <= y) != (y1[i] <= y)
        if not cond.any():
            continue
        dy = y1[i] - y0[i]
        xi = x0[i] + (y - y0[i]) / dy * (x1[i] - x0[i])
        inside ^= cond & (x < xi)
    return inside


def _proper_cross_rows(p1, p2, q1, q2):
    """Strict (interior) crossing test, vectorized over rows of q."""
    d1 = _cross_rows(np.broadcast_to(p2 - p1, q1.shape), q1 - p1)
    d2 = _cross_rows(np.broadcast_to(p2 - p1, q2.shape), q2 - p1)
    e = q2 - q1
    d3 = _cross_rows(e, np.broadcast_to(p1, q1.shape) - q1)
    d4 = _cross_rows(e, np.broadcast_to(p2, q1.shape) - q1)
    return (d1 * d2 < 0.0) & (d3 * d4 < 0.0)


def any_proper_crossing(A, B):
    """True if a segment of A crosses a segment of B transversally."""
    a1 = A
    a2 = np.roll(A, -1, axis=0)
    b1 = B
    b2 = np.roll(B, -1, axis=0)
    for i in range(len(A)):
        if _proper_cross_rows(a1[i], a2[i], b1, b2).any():
            return True
    return False


def self_intersects(poly):
    """True if non-adjacent segments of a closed polyline cross."""
    N = len(poly)
    a1 = poly
    a2 = np.roll(poly, -1, axis=0)
    idx = np.arange(N)
    for i in range(N - 1):
        j = idx[i + 2 :]
        if i == 0:
            j = j[:-1]  # segment N-1 is adjacent to segment 0
        if len(j) == 0:
            continue
        if _proper_cross_rows(a1[i], a2[i], a1[j], a2[j]).any():
            return True
    return False


# ---------------------------------------------------------------------------
# discrete Frechet distance between closed node sequences
# ---------------------------------------------------------------------------

def _frechet_batch(P, Q, shifts):
    """Linear discrete Frechet of loop-closed P vs Q rolled by each shift."""
    N, M = len(P), len(Q)
    I = np.arange(N + 1) % N
    J = (np.arange(M + 1)[None, :] + shifts[:, None]) % M
    PI = P[I]
    QJ = Q[J]
    d = np.hypot(PI[None, :, None, 0] - QJ[:, None, :, 0], PI[None, :, None, 1] - QJ[:, None, :, 1])
    ret = np.empty_like(d)
    ret[:, 0, :] = np.maximum.accumulate(d[:, 0, :], axis=1)
    ret[:, :, 0] = np.maximum.accumulate(d[:, :, 0], axis=1)
    for k in range(2, N + M + 1):
        i_lo = max(1, k - M)
        i_hi = min(N, k - 1)
        if i_lo > i_hi:
            continue
        ii = np.arange(i_lo, i_hi + 1)
        jj = k - ii
        m3 = np.minimum(np.minimum(ret[:, ii - 1, jj], ret[:, ii, jj - 1]), ret[:, ii - 1, jj - 1])
        ret[:, ii, jj] = np.maximum(m3, d[:, ii, jj])
    return ret[:, N, M]

def discrete_frechet_cyclic(P, Q, chunk=32):
    """Cyclic discrete Frechet distance (min over start shifts of Q).

    Shifts are processed in order of the lower bound |P_0 - Q_s| so most are
    pruned once a good alignment is found.
    """
    lb = np.hypot(P[0, 0] - Q[:, 0], P[0, 1] - Q[:, 1])
    order = np.argsort(lb, kind="stable")
    best = np.inf
    pos = 0
    while pos < len(order):
        sel = np.array([s for s in order[pos : pos + chunk] if lb[s] < best])
        if len(sel) == 0:
            break
        vals = _frechet_batch(P, Q, sel)
        best = min(best, vals.min())
        pos += chunk
    return float(best)


def frechet_cyclic_coupling(P, Q):
    """Best-shift discrete Frechet coupling.

    Returns (value, shift, pairs) where pairs is the monotone list of
    (i, j_unrolled) index pairs of the optimal coupling for loop-closed
    sequences; Q indices are j_unrolled + shift (not reduced mod M).
    """
    lb = np.hypot(P[0, 0] - Q[:, 0], P[0, 1] - Q[:, 1])
    order = np.argsort(lb, kind="stable")
    vals = _frechet_batch(P, Q, order)
    k = int(np.argmin(vals))
    shift = int(order[k])
    value = float(vals[k])
    N, M = len(P), len(Q)
    I = np.arange(N + 1) % N
    J = (np.arange(M + 1) + shift) % M
    PI = P[I]
    QJ = Q[J]
    d = np.hypot(PI[:, None, 0] - QJ[None, :, 0], PI[:, None, 1] - QJ[None, :, 1])
    ret = np.empty_like(d)
    ret[0, :] = np.maximum.accumulate(d[0, :])
    ret[:, 0] = np.maximum.accumulate(d[:, 0])
    for k2 in range(2, N + M + 1):
        i_lo = max(1, k2 - M)
        i_hi = min(N, k2 - 1)
        if i_lo > i_hi:
            continue
        ii = np.arange(i_lo, i_hi + 1)
        jj = k2 - ii
        m3 = np.minimum(np.minimum(ret[ii - 1, jj], ret[ii, jj - 1]), ret[ii - 1, jj - 1])
        ret[ii, jj] = np.maximum(m3, d[ii, jj])
    i, j = N, M
    pairs = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            c = (ret[i - 1, j - 1], ret[i - 1, j], ret[i, j - 1])
            a = int(np.argmin(c))
            if a == 0:
                i, j = i - 1, j - 1
            elif a == 1:
                i -= 1
            else:
                j -= 1
        pairs.append((i, j))
    pairs.reverse()
    return value, shift, pairs


# ---------------------------------------------------------------------------
# periodic one-sided maximal operator
# ---------------------------------------------------------------------------

def maximal_op(f):
    """Discrete max of one-sided window averages (windows up to N//2 nodes)."""
    af = np.abs(np.asarray(f, dtype=float))
    N = len(af)
    W = N // 2
    ext = np.concatenate([af, af[:W]])
    csum = np.concatenate([[0.0], np.cumsum(ext)])
    out = np.zeros(N)
    idx = np.arange(N)
    for k in range(W):
        fwd = (csum[idx + k + 1] - csum[idx]) / (k + 1)
        np.maximum(out, fwd, out=out)
    # backward windows: average of af[i-k .. i]
    extb = np.concatenate([af[-W:], af])
    csb = np.concatenate([[0.0], np.cumsum(extb)])
    for k in range(W):
        bwd = (csb[idx + W + 1] - csb[idx + W - k]) / (k + 1)
        np.maximum(out, bwd, out=out)
    return out
