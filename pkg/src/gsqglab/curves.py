"""Discrete closed plane curves.

A curve is a cyclic list of N nodes sampling a parametrization over the unit
circle. Differential geometry (tangents, normals, curvature, length) is
computed by trigonometric differentiation on constant-speed curves; general
curves (e.g. freshly transported ones) must be resampled first.

Conventions: the perp of (x1, x2) is (-x2, x1); the normal is N = T-perp,
which points inward for positively oriented (counterclockwise) curves, and
the signed curvature of a CCW circle of radius R is +1/R.
"""

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from . import _backend
from .errors import (
    DegenerateCurve,
    InvalidExponent,
    PointOnCurve,
    WrongParametrization,
)

CONSTANT_SPEED_RTOL = 1e-6
MIN_NODES = 16


@dataclass(frozen=True)
class ClosedCurve:
    """Discretized closed curve with optional cached geometry fields."""

    nodes: np.ndarray  # (N, 2)
    param_kind: str = "general"  # "constant_speed" | "general"
    tangent: np.ndarray | None = None
    normal: np.ndarray | None = None
    curvature: np.ndarray | None = None
    speed: np.ndarray | None = None
    length: float | None = None

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise ValueError("nodes must have shape (N, 2)")
        N = len(nodes)
        if N < MIN_NODES or N % 2:
            raise ValueError(f"need an even number of nodes >= {MIN_NODES}, got {N}")
        chord = np.hypot(*np.diff(np.vstack([nodes, nodes[:1]]), axis=0).T)
        if (chord == 0.0).any():
            raise ValueError("duplicated consecutive nodes")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if self.param_kind not in ("constant_speed", "general"):
            raise ValueError(f"unknown param_kind {self.param_kind!r}")

    @property
    def n(self):
        return len(self.nodes)

    def has_geometry(self):
        return self.tangent is not None


# ---------------------------------------------------------------------------
# spectral helpers (uniform periodic grids)
# ---------------------------------------------------------------------------

def fft_derivative(values, order=1):
    """Derivative of periodically sampled columns w.r.t. the unit parameter."""
    v = np.asarray(values, dtype=float)
    N = v.shape[0]
    k = np.fft.rfftfreq(N, 1.0 / N)
    mult = (2j * np.pi * k) ** order
    if order % 2:
        mult[-1] = 0.0  # Nyquist mode has no meaningful odd derivative
    out = np.empty_like(v)
    for c in range(v.shape[1]):
        out[:, c] = np.fft.irfft(mult * np.fft.rfft(v[:, c]), n=N)
    return out


def fft_upsample(values, factor):
    """Evaluate the trigonometric interpolant on a grid refined by `factor`."""
    v = np.asarray(values, dtype=float)
    if factor == 1:
        return v.copy()
    N = v.shape[0]
    M = N * factor
    out = np.empty((M, v.shape[1]))
    for c in range(v.shape[1]):
        F = np.fft.rfft(v[:, c])
        Fz = np.zeros(M // 2 + 1, dtype=complex)
        Fz[: N // 2] = F[: N // 2]
        Fz[N // 2] = F[N // 2] * 0.5  # split Nyquist symmetrically
        out[:, c] = np.fft.irfft(Fz * factor, n=M)
    return out


def _polygon_scale(nodes):
    ext = nodes.max(axis=0) - nodes.min(axis=0)
    return float(np.hypot(ext[0], ext[1]))


# ---------------------------------------------------------------------------
# construction and geometry
# ---------------------------------------------------------------------------

def geometry_fields(curve: ClosedCurve) -> ClosedCurve:
    """Fill tangents, normals, curvature, node speeds and total length."""
    if curve.param_kind != "constant_speed":
        raise WrongParametrization("geometry fields need a constant-speed curve")
    if curve.has_geometry():
        return curve
    d1 = fft_derivative(curve.nodes)
    d2 = fft_derivative(curve.nodes, order=2)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    length = float(speed.mean())
    tangent = d1 / speed[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    curvature = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    for arr in (tangent, normal, curvature, speed):
        arr.setflags(write=False)
    return replace(
        curve,
        tangent=tangent,
        normal=normal,
        curvature=curvature,
        speed=speed,
        length=length,
    )


def speed_uniformity(curve: ClosedCurve) -> float:
    """Relative spread of node speeds (0 for a perfect constant-speed grid)."""
    d1 = fft_derivative(curve.nodes)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    m = speed.mean()
    return float((speed.max() - speed.min()) / m)


def _spline_through(nodes):
    closed = np.vstack([nodes, nodes[:1]])
    chord = np.hypot(*np.diff(closed, axis=0).T)
    t = np.concatenate([[0.0], np.cumsum(chord)])
    return CubicSpline(t, closed, bc_type="periodic"), t[-1]


def resample_constant_speed(curve: ClosedCurve, N: int) -> ClosedCurve:
    """Resample to N nodes equispaced in the arclength of the interpolating
    periodic cubic spline. Preserves orientation and the curve image up to
    spline interpolation error.
    """
    if N < MIN_NODES or N % 2:
        raise ValueError(f"N must be even and >= {MIN_NODES}")
    nodes = curve.nodes
    chords = np.hypot(*np.diff(np.vstack([nodes, nodes[:1]]), axis=0).T)
    # point-collapse guard: length negligible at the curve's position scale
    if chords.sum() <= 1e-12 * (np.abs(nodes).max() + 1.0):
        raise DegenerateCurve("polygonal length negligible; curve collapsed to a point")
    sp, T = _spline_through(nodes)

    # arclength table on a dense grid, then per-target Gauss refinement
    dense = np.linspace(0.0, T, 16 * len(nodes) + 1)
    dv = sp(dense, 1)
    spd = np.hypot(dv[:, 0], dv[:, 1])
    s_dense = np.concatenate([[0.0], np.cumsum((spd[1:] + spd[:-1]) * 0.5 * np.diff(dense))])
    total = s_dense[-1]
    target = np.arange(N) * total / N

    gx, gw = np.polynomial.legendre.leggauss(8)

    def arclen(tq):
        # s(tq) = s(dense_k) + Gauss integral over [dense_k, tq]
        k = np.clip(np.searchsorted(dense, tq, side="right") - 1, 0, len(dense) - 2)
        a = dense[k]
        half = (tq - a) * 0.5
        pts = a[:, None] + half[:, None] * (gx[None, :] + 1.0)
        d = sp(pts.ravel(), 1).reshape(len(tq), len(gx), 2)
        spd_q = np.hypot(d[..., 0], d[..., 1])
        return s_dense[k] + half * (spd_q * gw[None, :]).sum(axis=1)

    ti = np.interp(target, s_dense, dense)
    for _ in range(3):
        d = sp(ti, 1)
        ti = ti - (arclen(ti) - target) / np.hypot(d[:, 0], d[:, 1])
        ti = np.clip(ti, 0.0, T)
    new_nodes = sp(ti)
    return geometry_fields(ClosedCurve(new_nodes, "constant_speed"))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def h2_seminorm(curve: ClosedCurve) -> float:
    """L2 norm of the signed curvature over arclength."""
    c = geometry_fields(curve)
    ds = c.length / c.n
    return float(np.sqrt((c.curvature**2).sum() * ds))


def c1beta_seminorm(curve: ClosedCurve, beta: float) -> float:
    """Discrete Holder seminorm of the tangent: sup |T(s)-T(s')| / d_arc^beta.

    A lower bound of the continuum seminorm, converging as N grows.
    """
    if not 0.0 < beta <= 1.0:
        raise InvalidExponent(f"beta must lie in (0, 1], got {beta}")
    c = geometry_fields(curve)
    ds = c.length / c.n
    return float(_backend.tangent_pair_sup(np.ascontiguousarray(c.tangent), ds, beta))


def enclosed_area(curve: ClosedCurve) -> float:
    """Signed area by Green's theorem; positive iff positively oriented.

    Constant-speed curves use the spectrally accurate trapezoid of
    (x y' - y x')/2; general curves fall back to the polygon shoelace.
    """
    if curve.param_kind == "constant_speed":
        d1 = fft_derivative(curve.nodes)
        x, y = curve.nodes.T
        return float(0.5 * np.mean(x * d1[:, 1] - y * d1[:, 0]))
    x, y = curve.nodes.T
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# orientation and winding
# ---------------------------------------------------------------------------

def winding_number(curve: ClosedCurve, x) -> int:
    """Winding of the curve around x, by summed signed angle increments."""
    x = np.asarray(x, dtype=float)
    d, _, _ = _backend.point_polyline_dist(x[None, :], curve.nodes)
    if d[0] < 1e-10:
        raise PointOnCurve(f"point {x} lies on the curve")
    v = curve.nodes - x
    w = np.roll(v, -1, axis=0)
    ang = np.arctan2(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0], (v * w).sum(axis=1))
    return int(np.rint(ang.sum() / (2.0 * np.pi)))


def interior_point(curve: ClosedCurve):
    """A point strictly inside a simple closed curve (horizontal-chord rule)."""
    nodes = curve.nodes
    ylo, yhi = nodes[:, 1].min(), nodes[:, 1].max()
    for frac in (0.5, 0.37, 0.61, 0.25, 0.75, 0.45, 0.55):
        y = ylo + frac * (yhi - ylo)
        if np.any(np.abs(nodes[:, 1] - y) < 1e-12 * max(yhi - ylo, 1e-300)):
            continue
        y0 = nodes[:, 1]
        y1 = np.roll(y0, -1)
        hit = (y0 < y) != (y1 < y)
        if hit.sum() < 2:
            continue
        x0 = nodes[:, 0]
        x1 = np.roll(x0, -1)
        xs = np.sort(x0[hit] + (y - y0[hit]) / (y1[hit] - y0[hit]) * (x1[hit] - x0[hit]))
        return np.array([0.5 * (xs[0] + xs[1]), y])
    raise DegenerateCurve("could not locate an interior point")


def is_positively_oriented(curve: ClosedCurve) -> bool:
    return winding_number(curve, interior_point(curve)) == 1


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

def transport(curve: ClosedCurve, field, h: float) -> ClosedCurve:
    """Move every node by h times the field value there.

    `field` maps an (N, 2) array of points to an (N, 2) array of vectors
    (a single-point callable is also accepted).
    """
    try:
        v = np.asarray(field(curve.nodes), dtype=float)
        if v.shape != curve.nodes.shape:
            raise ValueError
    except Exception:
        v = np.array([field(p) for p in curve.nodes], dtype=float)
    return ClosedCurve(curve.nodes + h * v, "general")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def curve_to_json(curve: ClosedCurve) -> str:
    return json.dumps(
        {
            "nodes": [[float(x), float(y)] for x, y in curve.nodes],
            "param_kind": curve.param_kind,
            "closed": True,
        }
    )


def curve_from_json(text: str) -> ClosedCurve:
    obj = json.loads(text)
    if not obj.get("closed", True):
        raise ValueError("only closed curves are supported")
    return ClosedCurve(np.array(obj["nodes"], dtype=float), obj.get("param_kind", "general"))


def curve_to_svg_path(curve: ClosedCurve) -> str:
    """SVG path data for the closed polyline (stroke-only rendering)."""
    pts = curve.nodes
    head = f"M {pts[0, 0]:.6g} {pts[0, 1]:.6g} "
    body = " ".join(f"L {x:.6g} {y:.6g}" for x, y in pts[1:])
    return head + body + " Z"
