"""Active-scalar patch kernel and the induced velocity field.

The velocity generated by a patch family is evaluated two independent ways:
as a boundary integral of the (optionally mollified) kernel against the
curve tangents, and as an area integral of the perp-gradient kernel over the
patch interiors. For positively oriented curves the two agree; the area
route is kept deliberately separate so it can serve as an oracle for the
contour route.

On-curve evaluation with an unmollified kernel uses a staggered grid
(targets at nodes, sources at midpoints) so the integrable |s - s'|^(-2a)
singularity is never sampled at zero; the quadrature error is
O(N^-(1-2a) log N).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from . import _backend
from .curves import ClosedCurve, fft_derivative, geometry_fields, is_positively_oriented
from .errors import SingularEvaluation, TooCloseToBoundary, NotSimple


# ---------------------------------------------------------------------------
# cutoff profile and kernel spec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffProfile:
    """Smooth even cutoff: 0 on [0, floor], 1 outside (-1, 1), monotone between."""

    value: callable
    deriv: callable
    floor: float = _backend.CHI_FLOOR
    is_default: bool = False


def default_cutoff() -> CutoffProfile:
    return CutoffProfile(
        value=_backend.chi_default,
        deriv=_backend.chi_default_deriv,
        floor=_backend.CHI_FLOOR,
        is_default=True,
    )


@dataclass(frozen=True)
class KernelSpec:
    """Kernel exponent, normalization, mollification radius and cutoff.

    quad_oversample refines the source sampling of each curve's trigonometric
    interpolant for boundary quadrature (the modeled curve is unchanged).
    """

    alpha: float
    c_alpha: float = 1.0
    epsilon: float = 0.0
    chi: CutoffProfile = field(default_factory=default_cutoff)
    quad_oversample: int = 2

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if self.c_alpha <= 0.0:
            raise ValueError("c_alpha must be positive")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")
        if self.quad_oversample < 1:
            raise ValueError("quad_oversample must be >= 1")

    def with_epsilon(self, eps):
        return KernelSpec(self.alpha, self.c_alpha, eps, self.chi, self.quad_oversample)


def kernel_eval(spec: KernelSpec, x) -> float:
    """Point value of the (mollified) kernel."""
    r = float(np.hypot(*np.asarray(x, dtype=float)))
    if spec.epsilon == 0.0:
        if r == 0.0:
            raise SingularEvaluation("unmollified kernel at the origin")
        return spec.c_alpha / (2.0 * spec.alpha * r ** (2.0 * spec.alpha))
    if r <= spec.epsilon * spec.chi.floor:
        return 0.0
    chi = float(spec.chi.value(np.array([r / spec.epsilon]))[0])
    return chi * spec.c_alpha / (2.0 * spec.alpha * r ** (2.0 * spec.alpha))


# ---------------------------------------------------------------------------
# patch family
# ---------------------------------------------------------------------------

class PatchFamily:
    """Indexed family of positively oriented simple curves with strengths."""

    def __init__(self, curves, strengths, validate=True):
        if len(curves) != len(strengths):
            raise ValueError("curves and strengths must have equal length")
        if len(curves) == 0:
            raise ValueError("family must contain at least one patch")
        strengths = [float(t) for t in strengths]
        if any(t == 0.0 for t in strengths):
            raise ValueError("strengths must be nonzero")
        curves = [geometry_fields(c) for c in curves]
        if validate:
            for k, c in enumerate(curves):
                if _backend.self_intersects(c.nodes):
                    raise NotSimple(f"patch {k} boundary self-intersects")
                if not is_positively_oriented(c):
                    raise ValueError(f"patch {k} is not positively oriented")
        self.curves = curves
        self.strengths = strengths

    def __len__(self):
        return len(self.curves)

    @property
    def total_strength(self):
        return sum(abs(t) for t in self.strengths)

    @property
    def min_strength(self):
        return min(abs(t) for t in self.strengths)

    def with_curves(self, curves, validate=True):
        return PatchFamily(curves, self.strengths, validate=validate)


# ---------------------------------------------------------------------------
# source sampling for boundary quadrature
# ---------------------------------------------------------------------------

def _fft_sample(nodes, factor, offset):
    """Trig-interpolant samples and parameter derivative at xi=(j+offset)/M."""
    N = len(nodes)
    M = N * factor
    k = np.fft.fftfreq(N, 1.0 / N)
    phase = np.exp(2j * np.pi * k * offset / M)
    src = np.empty((M, 2))
    dsrc = np.empty((M, 2))
    pad_idx = np.fft.fftfreq(M, 1.0 / M)
    for c in range(2):
        F = np.fft.fft(nodes[:, c]) * phase
        Fpad = np.zeros(M, dtype=complex)
        half = N // 2
        Fpad[:half] = F[:half]
        Fpad[-half:] = F[-half:]
        src[:, c] = np.fft.ifft(Fpad * factor).real
        dF = Fpad * (2j * np.pi * pad_idx)
        dsrc[:, c] = np.fft.ifft(dF * factor).real
    return src, dsrc / M


def quadrature_sources(nodes, spec: KernelSpec):
    """Source points and tangent-weighted quadrature vectors for one curve.

    Unmollified kernels get a half-cell staggered source grid so on-curve
    targets never coincide with a source.
    """
    offset = 0.5 if spec.epsilon == 0.0 else 0.0
    return _fft_sample(np.asarray(nodes, dtype=float), spec.quad_oversample, offset)


def _velocity_sum_custom(targets, src, dsrc, spec):
    """Generic-cutoff boundary sum (NumPy path for non-default profiles)."""
    d = targets[:, None, :] - src[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    K = np.zeros_like(r)
    live = r > spec.epsilon * spec.chi.floor if spec.epsilon > 0 else r > 0
    rl = r[live]
    K[live] = spec.c_alpha / (2.0 * spec.alpha * rl ** (2.0 * spec.alpha))
    if spec.epsilon > 0:
        K[live] *= spec.chi.value(rl / spec.epsilon)
    return K @ dsrc


def _dvelocity_sum_custom(targets, tvecs, src, dsrc, spec):
    d = targets[:, None, :] - src[None, :, :]
    r = np.maximum(np.hypot(d[..., 0], d[..., 1]), 1e-300)
    dK = np.zeros_like(r)
    live = r > spec.epsilon * spec.chi.floor if spec.epsilon > 0 else r > 0
    rl = r[live]
    base = spec.c_alpha / (2.0 * spec.alpha * rl ** (2.0 * spec.alpha))
    if spec.epsilon > 0:
        t = rl / spec.epsilon
        dK[live] = spec.chi.deriv(t) / spec.epsilon * base - spec.chi.value(t) * spec.c_alpha * rl ** (
            -1.0 - 2.0 * spec.alpha
        )
    else:
        dK[live] = -spec.c_alpha * rl ** (-1.0 - 2.0 * spec.alpha)
    proj = (d[..., 0] * tvecs[:, None, 0] + d[..., 1] * tvecs[:, None, 1]) / r
    return (dK * proj) @ dsrc


def _sum_over_sources(targets, sources, strengths, spec):
    u = np.zeros_like(targets)
    for (src, dsrc), th in zip(sources, strengths):
        if spec.chi.is_default or spec.epsilon == 0.0:
            u += th * _backend.velocity_sum(
                np.ascontiguousarray(targets), src, dsrc, spec.alpha, spec.c_alpha, spec.epsilon
            )
        else:
            u += th * _velocity_sum_custom(targets, src, dsrc, spec)
    return u


def velocity_at_nodes(node_arrays, strengths, spec: KernelSpec):
    """Velocity samples at the nodes of every curve in a raw-array family.

    This is the integrator's hot path: curves may be in a general
    parametrization (the boundary integral is parametrization invariant).
    """
    sources = [quadrature_sources(nodes, spec) for nodes in node_arrays]
    return [_sum_over_sources(np.asarray(nodes, dtype=float), sources, strengths, spec) for nodes in node_arrays]


# ---------------------------------------------------------------------------
# public velocity operations
# ---------------------------------------------------------------------------

def contour_velocity(family: PatchFamily, spec: KernelSpec, x) -> np.ndarray:
    """Velocity at point(s) x by boundary quadrature."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if spec.epsilon == 0.0:
        for c in family.curves:
            d, _, _ = _backend.point_polyline_dist(pts, c.nodes)
            if (d <= c.length / c.n).any():
                raise TooCloseToBoundary(
                    "unmollified evaluation within one grid spacing of a boundary; "
                    "use velocity_on_boundary for on-curve sampling"
                )
    sources = [quadrature_sources(c.nodes, spec) for c in family.curves]
    u = _sum_over_sources(pts, sources, family.strengths, spec)
    return u[0] if np.asarray(x).ndim == 1 else u


def velocity_on_boundary(family: PatchFamily, spec: KernelSpec, lam: int) -> np.ndarray:
    """Velocity samples at the nodes of curve lam induced by the family."""
    targets = family.curves[lam].nodes
    sources = [quadrature_sources(c.nodes, spec) for c in family.curves]
    return _sum_over_sources(targets, sources, family.strengths, spec)


def tangential_derivative(family: PatchFamily, spec: KernelSpec, lam: int) -> np.ndarray:
    """Arclength derivative of the boundary velocity along curve lam.

    Quadrature of the differentiated kernel contracted with the target
    tangent; validated elsewhere against spectral differentiation of the
    sampled boundary velocity. The differentiated kernel is one power more
    singular than the velocity kernel (its near-diagonal cancellation is
    only odd-symmetric), so sources are sampled at least 8x finer.
    """
    cur = family.curves[lam]
    targets = cur.nodes
    tvecs = np.ascontiguousarray(cur.tangent)
    fine = KernelSpec(
        spec.alpha, spec.c_alpha, spec.epsilon, spec.chi, max(8, spec.quad_oversample)
    )
    out = np.zeros_like(targets)
    for c, th in zip(family.curves, family.strengths):
        src, dsrc = quadrature_sources(c.nodes, fine)
        if spec.chi.is_default or spec.epsilon == 0.0:
            out += th * _backend.dvelocity_sum(
                np.ascontiguousarray(targets), tvecs, src, dsrc, spec.alpha, spec.c_alpha, spec.epsilon
            )
        else:
            out += th * _dvelocity_sum_custom(targets, tvecs, src, dsrc, spec)
    return out


# ---------------------------------------------------------------------------
# area-integral velocity (independent oracle)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _patch_cells_cached(nodes_bytes, n, resolution, max_depth):
    nodes = np.frombuffer(nodes_bytes, dtype=float).reshape(n, 2)
    return _patch_cells(nodes, resolution, max_depth)


def _patch_cells(nodes, resolution, max_depth):
    """Adaptive cell decomposition of a patch interior.

    Cells are squares refined toward the boundary; surviving cells are
    classified by their centers and are entirely inside/outside except for
    the boundary band at the deepest level.
    """
    lo = nodes.min(axis=0)
    hi = nodes.max(axis=0)
    ext = hi - lo
    cell = ext.max() / resolution
    nx = int(np.ceil(ext[0] / cell))
    ny = int(np.ceil(ext[1] / cell))
    cx = lo[0] + (np.arange(nx) + 0.5) * cell
    cy = lo[1] + (np.arange(ny) + 0.5) * cell
    gx, gy = np.meshgrid(cx, cy, indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    sizes = np.full(len(centers), cell)
    tree = cKDTree(nodes)
    half_chord = 0.5 * np.hypot(*np.diff(np.vstack([nodes, nodes[:1]]), axis=0).T).max()
    kept_centers = []
    kept_sizes = []
    for depth in range(max_depth + 1):
        d_nodes = tree.query(centers, k=1)[0]
        margin = 0.75 * sizes + half_chord
        near = d_nodes < margin
        if depth == max_depth:
            keep = np.ones(len(centers), dtype=bool)
            refine = np.zeros(len(centers), dtype=bool)
        else:
            refine = near
            keep = ~near
        if keep.any():
            kc = centers[keep]
            inside = _backend.winding_inside(kc, nodes)
            kept_centers.append(kc[inside])
            kept_sizes.append(sizes[keep][inside])
        if not refine.any():
            break
        rc = centers[refine]
        rs = sizes[refine]
        offs = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        centers = (rc[:, None, :] + offs[None, :, :] * (rs[:, None, None] / 4.0)).reshape(-1, 2)
        sizes = np.repeat(rs / 2.0, 4)
    return np.vstack(kept_centers), np.concatenate(kept_sizes)


def _refine_near_point(centers, sizes, x, ratio=0.2, min_size=None):
    """Split inside-cells near x so the integrand is resolved there."""
    cs, ss = centers, sizes
    for _ in range(24):
        d = np.hypot(cs[:, 0] - x[0], cs[:, 1] - x[1])
        split = ss > np.maximum(ratio * d, min_size if min_size else 0.0)
        if not split.any():
            break
        keep_c, keep_s = cs[~split], ss[~split]
        rc, rs = cs[split], ss[split]
        offs = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        new_c = (rc[:, None, :] + offs[None, :, :] * (rs[:, None, None] / 4.0)).reshape(-1, 2)
        new_s = np.repeat(rs / 2.0, 4)
        cs = np.vstack([keep_c, new_c])
        ss = np.concatenate([keep_s, new_s])
    return cs, ss


def area_velocity(family: PatchFamily, spec: KernelSpec, x, resolution: int = 64) -> np.ndarray:
    """Velocity at x by adaptive cell quadrature over the patch interiors.

    Independent of the contour route; `resolution` is the base cell count
    across each patch bounding box (cells are refined toward boundaries and
    toward x). Mollification is ignored: this is the eps=0 field.
    """
    x = np.asarray(x, dtype=float)
    u = np.zeros(2)
    for c, th in zip(family.curves, family.strengths):
        centers, sizes = _patch_cells_cached(c.nodes.tobytes(), c.n, resolution, 6)
        min_size = sizes.min() / 4.0
        centers, sizes = _refine_near_point(centers, sizes, x, min_size=min_size)
        d = x[None, :] - centers
        r = np.hypot(d[:, 0], d[:, 1])
        ok = r > sizes  # drop the cell containing x (symmetric leading term)
        w = r[ok] ** (-(2.0 + 2.0 * spec.alpha)) * sizes[ok] ** 2
        perp = np.column_stack([-d[ok, 1], d[ok, 0]])
        u += spec.c_alpha * th * (perp * w[:, None]).sum(axis=0)
    return u


def area_velocity_polar(family: PatchFamily, spec: KernelSpec, x, n_angles: int = 4096) -> np.ndarray:
    """Velocity at x by exact radial integration along rays (cross-check).

    The radial part of the area integral has the closed form
    rho^(1-2a)/(1-2a); only the angular integral is discretized.
    """
    x = np.asarray(x, dtype=float)
    p = 1.0 - 2.0 * spec.alpha
    phis = (np.arange(n_angles) + 0.5) * (2.0 * np.pi / n_angles)
    e = np.column_stack([np.cos(phis), np.sin(phis)])
    u = np.zeros(2)
    for c, th in zip(family.curves, family.strengths):
        a = c.nodes
        b = np.roll(a, -1, axis=0)
        A = b - a
        rhs = a - x
        det = e[:, None, 0] * (-A[None, :, 1]) - e[:, None, 1] * (-A[None, :, 0])
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = (rhs[None, :, 0] * (-A[None, :, 1]) - rhs[None, :, 1] * (-A[None, :, 0])) / det
            tt = (e[:, None, 0] * rhs[None, :, 1] - e[:, None, 1] * rhs[None, :, 0]) / det
        hit = (np.abs(det) > 1e-14) & (tt >= 0.0) & (tt < 1.0) & (rho > 0.0)
        rho = np.where(hit, rho, np.nan)
        rho_sorted = np.sort(rho, axis=1)
        counts = hit.sum(axis=1)
        seg = np.zeros(n_angles)
        for i in range(n_angles):
            k = counts[i] - (counts[i] % 2)
            if k == 0:
                continue
            rr = rho_sorted[i, :k] ** p
            seg[i] = (rr[1::2] - rr[0::2]).sum() / p
        u += -spec.c_alpha * th * (
            np.column_stack([-e[:, 1], e[:, 0]]) * seg[:, None]
        ).sum(axis=0) * (2.0 * np.pi / n_angles)
    return u
