"""Initial-data constructors and scenario configuration.

Analytic shapes are sampled at constant speed by inverting a high-resolution
arclength table of the exact parametrization, so no spline error enters the
starting data. Also holds the inward-perturbation construction used to
separate touching patches, the reflected (doubly-odd) family builder, and
the TOML scenario loader.
"""

import sys
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .curves import ClosedCurve, geometry_fields, c1beta_seminorm, enclosed_area, h2_seminorm, resample_constant_speed
from .errors import ConfigError, InvalidWindow, NotSimple, OutOfHalfPlane, PerturbationTooLarge
from .metrics import pair_distance, self_distance
from .velocity import PatchFamily

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# ---------------------------------------------------------------------------
# analytic shapes
# ---------------------------------------------------------------------------

def _constant_speed_polar(radius, radius_prime, N, center=(0.0, 0.0)):
    """Sample r(theta) at N points equispaced in exact arclength."""
    M = max(200 * N, 20000)
    th = np.linspace(0.0, 2.0 * np.pi, M + 1)
    r = radius(th)
    rp = radius_prime(th)
    spd = np.sqrt(r * r + rp * rp)
    s = np.concatenate([[0.0], np.cumsum((spd[1:] + spd[:-1]) * 0.5 * np.diff(th))])
    total = s[-1]
    ti = np.interp(np.arange(N) * total / N, s, th)
    # Newton polish on s(theta) = target using the analytic speed
    target = np.arange(N) * total / N
    for _ in range(3):
        si = np.interp(ti, th, s)
        rr = radius(ti)
        rpp = radius_prime(ti)
        ti = ti - (si - target) / np.sqrt(rr * rr + rpp * rpp)
    rr = radius(ti)
    nodes = np.column_stack([rr * np.cos(ti), rr * np.sin(ti)]) + np.asarray(center, dtype=float)
    return geometry_fields(ClosedCurve(nodes, "constant_speed"))


def make_shape(kind: str, params: dict, N: int) -> ClosedCurve:
    """Construct a positively oriented, simple, constant-speed curve.

    kinds: circle {radius, center}, ellipse {a, b, center},
    fourier {r0, cos: {k: a_k}, sin: {k: b_k}, center}.
    """
    params = dict(params)
    center = params.pop("center", (0.0, 0.0))
    if kind == "circle":
        R = float(params.pop("radius", params.pop("r", 1.0)))
        if params:
            raise ConfigError(f"unknown circle params {sorted(params)}")
        if R <= 0:
            raise ConfigError("radius must be positive")
        th = np.arange(N) * 2.0 * np.pi / N
        nodes = np.column_stack([R * np.cos(th), R * np.sin(th)]) + np.asarray(center, float)
        return geometry_fields(ClosedCurve(nodes, "constant_speed"))
    if kind == "ellipse":
        a = float(params.pop("a"))
        b = float(params.pop("b"))
        if params:
            raise ConfigError(f"unknown ellipse params {sorted(params)}")
        if a <= 0 or b <= 0:
            raise ConfigError("ellipse semi-axes must be positive")
        M = max(200 * N, 20000)
        th = np.linspace(0.0, 2.0 * np.pi, M + 1)
        spd = np.sqrt((a * np.sin(th)) ** 2 + (b * np.cos(th)) ** 2)
        s = np.concatenate([[0.0], np.cumsum((spd[1:] + spd[:-1]) * 0.5 * np.diff(th))])
        total = s[-1]
        target = np.arange(N) * total / N
        ti = np.interp(target, s, th)
        for _ in range(3):
            si = np.interp(ti, th, s)
            ti = ti - (si - target) / np.sqrt((a * np.sin(ti)) ** 2 + (b * np.cos(ti)) ** 2)
        nodes = np.column_stack([a * np.cos(ti), b * np.sin(ti)]) + np.asarray(center, float)
        return geometry_fields(ClosedCurve(nodes, "constant_speed"))
    if kind == "fourier":
        r0 = float(params.pop("r0", 1.0))
        cos_c = {int(k): float(v) for k, v in params.pop("cos", {}).items()}
        sin_c = {int(k): float(v) for k, v in params.pop("sin", {}).items()}
        if params:
            raise ConfigError(f"unknown fourier params {sorted(params)}")

        def radius(t):
            r = np.full_like(t, r0)
            for k, a_k in cos_c.items():
                r += a_k * np.cos(k * t)
            for k, b_k in sin_c.items():
                r += b_k * np.sin(k * t)
            return r

        def radius_prime(t):
            r = np.zeros_like(t)
            for k, a_k in cos_c.items():
                r -= a_k * k * np.sin(k * t)
            for k, b_k in sin_c.items():
                r += b_k * k * np.cos(k * t)
            return r

        th = np.linspace(0.0, 2.0 * np.pi, 4096)
        if radius(th).min() <= 0:
            raise NotSimple("fourier radius must stay positive")
        curve = _constant_speed_polar(radius, radius_prime, N, center)
        if _backend.self_intersects(curve.nodes):
            raise NotSimple("fourier shape self-intersects")
        return curve
    raise ConfigError(f"unknown shape kind {kind!r}")


def random_fourier_curve(rng, N=256, r0=1.0, max_mode=6, amp=0.15, center=(0.0, 0.0)):
    """Random smooth simple curve r = r0 + sum a_k cos + b_k sin, |a_k| <= amp/k^2."""
    cos_c = {k: rng.uniform(-amp / k**2, amp / k**2) for k in range(1, max_mode + 1)}
    sin_c = {k: rng.uniform(-amp / k**2, amp / k**2) for k in range(1, max_mode + 1)}
    return make_shape("fourier", {"r0": r0, "cos": cos_c, "sin": sin_c, "center": center}, N)


# ---------------------------------------------------------------------------
# inward perturbation (separating construction)
# ---------------------------------------------------------------------------

def _support_bump(x):
    out = np.zeros_like(x)
    m = np.abs(x) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - x[m] ** 2))
    return out


def _partition_cell_constants():
    """Slope and bending constants of one partition transition, in cell units.

    The partition functions are translates of a single profile when the
    anchors are equally spaced, so one finely resolved transition cell
    determines the constants exactly.
    """
    x = np.linspace(0.0, 1.0, 200_001)
    phi = _support_bump(x) / (_support_bump(x) + _support_bump(x - 1.0))
    dx = x[1] - x[0]
    d1 = np.gradient(phi, dx)
    d2 = np.gradient(d1, dx)
    c1 = float(np.abs(d1).max())
    c2 = float(np.sqrt((d2**2).sum() * dx))
    return c1, c2


_CELL_C1, _CELL_C2 = _partition_cell_constants()


def _partition_layout(ell, holder):
    n_part = int(np.ceil(16.0 * ell * holder**2))
    d = ell / n_part
    # each partition function has two transitions of width d
    M_const = max(_CELL_C1 / d / holder**2, np.sqrt(2.0) * _CELL_C2 / d**1.5 / holder**3)
    return n_part, d, M_const


def perturb_ceiling(curve: ClosedCurve, h: float, c: float) -> float:
    """Largest admissible inward-perturbation magnitude for (curve, h, c)."""
    cc = geometry_fields(curve)
    holder = c1beta_seminorm(cc, 0.5)
    _, _, M_const = _partition_layout(cc.length, holder)
    return min(c * self_distance(cc, h) / 10.0, 1.0 / (17.0 * M_const * cc.length * holder**4))


def perturb_inward(curve: ClosedCurve, h: float, c: float, eps: float) -> ClosedCurve:
    """Push a curve inward by eps along a partition-of-unity normal field.

    The window h controls the self-distance scale being protected; c in
    (0, 1] shrinks that window for the output. The admissible ceiling for
    eps couples the current self-distance and the tangent regularity; above
    it the construction may lose simplicity, so it is rejected. The output
    satisfies: it is eps-close to the input, lies strictly inside it with a
    gap of at least eps/4 (up to grid error), its curvature energy grows by
    at most 4x, and its self-separation at window c*h keeps a 2c/7 share of
    the input's at window h.
    """
    cc = geometry_fields(curve)
    holder = c1beta_seminorm(cc, 0.5)
    ell = cc.length
    if not 0.0 < h <= holder**-2:
        raise InvalidWindow(f"h must lie in (0, {holder**-2:.3g}]")
    if not 0.0 < c <= 1.0:
        raise ValueError("c must lie in (0, 1]")
    n_part, d, M_const = _partition_layout(ell, holder)
    eps0 = min(c * self_distance(cc, h) / 10.0, 1.0 / (17.0 * M_const * ell * holder**4))
    if eps > eps0:
        raise PerturbationTooLarge(f"eps={eps:.3g} exceeds ceiling {eps0:.3g}")

    # the partition cells are narrower than the node spacing allows, so the
    # construction is evaluated on a refined grid and resampled back down
    from .curves import fft_upsample

    factor = max(1, int(np.ceil(8.0 * ell / (cc.n * d))))
    fine_nodes = fft_upsample(cc.nodes, factor)
    fine_normals_raw = fft_upsample(np.asarray(cc.normal), factor)
    n_fine = len(fine_nodes)
    s_fine = np.arange(n_fine) * ell / n_fine
    s_k = (np.arange(n_part) + 1.0) * d

    def wrap(x):
        return (x + 0.5 * ell) % ell - 0.5 * ell

    psi = _support_bump(wrap(s_fine[:, None] - s_k[None, :]) / d)  # (n_fine, n_part)
    weights = psi / psi.sum(axis=1, keepdims=True)
    idx = np.rint(s_k / (ell / cc.n)).astype(int) % cc.n
    anchor_normals = np.asarray(cc.normal)[idx]
    new_nodes = fine_nodes + eps * weights @ anchor_normals
    return resample_constant_speed(ClosedCurve(new_nodes, "general"), cc.n)


def separate_nested(curves, eps, c=1.0 / 16.0):
    """Shrink a containment-ordered list of curves so all gaps are positive.

    Curves must be ordered inner-to-outer under containment; curve k is
    pushed inward by eps / 5^k. If any magnitude exceeds its curve's
    admissible ceiling, the whole geometric sequence is scaled down so the
    5:1 ratios (which create the gaps) are preserved.
    """
    curves = [geometry_fields(cur) for cur in curves]
    windows = []
    for cur in curves:
        holder = c1beta_seminorm(cur, 0.5)
        q = h2_seminorm(cur) ** 2
        windows.append(min(1.0 / q, holder**-2, cur.length / 2.0))
    base = eps
    for k, (cur, h) in enumerate(zip(curves, windows)):
        ceiling = perturb_ceiling(cur, h, c)
        base = min(base, 0.99 * ceiling * 5.0**k)
    return [
        perturb_inward(cur, h, c, base / 5.0**k)
        for k, (cur, h) in enumerate(zip(curves, windows))
    ]


# ---------------------------------------------------------------------------
# reflected (doubly-odd) configurations
# ---------------------------------------------------------------------------

def reflect_curve(curve: ClosedCurve) -> ClosedCurve:
    """Mirror across the horizontal axis, restoring positive orientation.

    Node 0 of the result is the mirror image of node 0 of the input, so
    mirror symmetry can be checked node-by-node.
    """
    mirrored = curve.nodes * np.array([1.0, -1.0])
    reordered = np.roll(mirrored[::-1], 1, axis=0)
    out = ClosedCurve(reordered, curve.param_kind)
    return geometry_fields(out) if curve.param_kind == "constant_speed" else out


def doubly_odd_config(base) -> PatchFamily:
    """Extend upper-half-plane patches by their reflections with negated
    strengths, producing a family whose scalar field is odd in x2.
    """
    curves = []
    strengths = []
    for cur, th in base:
        if cur.nodes[:, 1].min() < -1e-12:
            raise OutOfHalfPlane("base curve dips below the horizontal axis")
        cc = geometry_fields(cur) if cur.param_kind == "constant_speed" else cur
        curves.append(cc)
        strengths.append(float(th))
    for cur, th in base:
        curves.append(reflect_curve(cur))
        strengths.append(-float(th))
    fam = PatchFamily(curves, strengths)
    # construction-time symmetry audit
    L = len(base)
    for lam in range(L):
        up = fam.curves[lam].nodes
        lo = fam.curves[L + lam].nodes
        expect = np.roll((up * np.array([1.0, -1.0]))[::-1], 1, axis=0)
        err = np.abs(lo - expect).max()
        if err > 1e-10:
            raise AssertionError(f"mirror construction error {err:.2e}")
    return fam


def doubly_odd_preset(N=128, radius=1.0, x_gap=0.04, y_gap=0.05, strength=1.0):
    """Four-patch blow-up candidate: two circles mirrored about the vertical
    axis with opposite strengths, plus their horizontal reflections.

    x_gap is the clearance between the two upper patches, y_gap their
    clearance above the horizontal axis.
    """
    cx = radius + x_gap / 2.0
    cy = radius + y_gap
    right = make_shape("circle", {"radius": radius, "center": (cx, cy)}, N)
    left_nodes = right.nodes * np.array([-1.0, 1.0])
    left = geometry_fields(ClosedCurve(np.roll(left_nodes[::-1], 1, axis=0), "constant_speed"))
    return doubly_odd_config([(right, strength), (left, -strength)])


# ---------------------------------------------------------------------------
# scenario configuration (TOML)
# ---------------------------------------------------------------------------

_SCALAR_KEYS = {
    "alpha": float,
    "c_alpha": float,
    "epsilon": float,
    "cfl": float,
    "N": int,
    "t_end": float,
    "output_every": int,
    "ceiling_L": float,
    "quad_oversample": int,
}


@dataclass
class ScenarioConfig:
    alpha: float = 1.0 / 6.0
    c_alpha: float = 1.0
    epsilon: float | None = None  # default: 0.1 x min curve diameter
    cfl: float = 0.5
    N: int = 256
    t_end: float = 1.0
    output_every: int = 5
    ceiling_L: float | None = None  # default: 1e3 x initial L
    quad_oversample: int = 2
    patches: list = field(default_factory=list)  # [{kind, params, strength}]
    doubly_odd: dict | None = None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ScenarioConfig:
    cfg = ScenarioConfig()
    raw = dict(raw)
    for key, cast in _SCALAR_KEYS.items():
        if key in raw:
            setattr(cfg, key, cast(raw.pop(key)))
    patches = raw.pop("patches", [])
    if not isinstance(patches, list):
        raise ConfigError("patches must be a list of tables")
    for p in patches:
        p = dict(p)
        kind = p.pop("kind", None)
        strength = p.pop("strength", None)
        params = p.pop("params", p)  # inline params are the leftover keys
        if kind is None or strength is None:
            raise ConfigError("each patch needs kind and strength")
        cfg.patches.append({"kind": kind, "params": dict(params), "strength": float(strength)})
    presets = raw.pop("presets", {})
    if presets:
        presets = dict(presets)
        cfg.doubly_odd = dict(presets.pop("doubly_odd", {}))
        if presets:
            raise ConfigError(f"unknown presets {sorted(presets)}")
    if raw:
        raise ConfigError(f"unknown config keys {sorted(raw)}")
    if not cfg.patches and cfg.doubly_odd is None:
        raise ConfigError("config defines no patches")
    return cfg


def build_family(cfg: ScenarioConfig) -> PatchFamily:
    if cfg.doubly_odd is not None:
        opts = dict(cfg.doubly_odd)
        opts.setdefault("N", cfg.N)
        return doubly_odd_preset(**opts)
    curves = []
    strengths = []
    for p in cfg.patches:
        curves.append(make_shape(p["kind"], p["params"], cfg.N))
        strengths.append(p["strength"])
    return PatchFamily(curves, strengths)
