"""Randomized numerical verification of the library's quantitative bounds.

Each check evaluates one inequality on seeded random curves or scalar fields
at the discrete level, with a declared slack (additive 1e-6 plus 2%
multiplicative) covering discretization: the discrete Holder seminorms are
lower bounds of their continuum values and all quadratures carry grid error.
A check fails only when the slack is exceeded; the worst witness is kept.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .alignment import smoothing_profile, mollify_curve
from .curves import ClosedCurve, c1beta_seminorm, enclosed_area, geometry_fields, h2_seminorm
from .scenarios import random_fourier_curve
from .velocity import KernelSpec, PatchFamily, velocity_on_boundary

REL_SLACK = 0.02
ABS_SLACK = 1e-6


# ---------------------------------------------------------------------------
# periodic one-sided maximal operator
# ---------------------------------------------------------------------------

def maximal_operator(f):
    """Max over one-sided window averages (window up to half the period).

    Windows are node ranges of 1..N//2 samples ending or starting at each
    node, so the output dominates |f| pointwise.
    """
    return _backend.maximal_op(np.asarray(f, dtype=float))


# ---------------------------------------------------------------------------
# report containers
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    check_id: str
    description: str
    passed: bool
    worst_ratio: float  # max LHS/(allowed RHS); <= 1 passes
    trials: int
    witness: dict | None = None

    def row(self):
        mark = "pass" if self.passed else "FAIL"
        return f"{self.check_id:<28} {mark:<5} worst={self.worst_ratio:10.6f}  n={self.trials}"


@dataclass
class SuiteReport:
    seed: int
    trials: int
    N: int
    backend: str
    checks: list = field(default_factory=list)

    def all_passed(self):
        return all(c.passed for c in self.checks)

    def table(self):
        head = f"verification suite: seed={self.seed} trials={self.trials} N={self.N} backend={self.backend}"
        lines = [head, "-" * len(head)]
        lines.extend(c.row() for c in self.checks)
        lines.append(f"{'ALL PASS' if self.all_passed() else 'FAILURES PRESENT'}")
        return "\n".join(lines)

    def to_json(self):
        return json.dumps(
            {
                "seed": self.seed,
                "trials": self.trials,
                "N": self.N,
                "backend": self.backend,
                "all_passed": self.all_passed(),
                "checks": [
                    {
                        "id": c.check_id,
                        "description": c.description,
                        "passed": c.passed,
                        "worst_ratio": c.worst_ratio,
                        "trials": c.trials,
                        "witness": c.witness,
                    }
                    for c in self.checks
                ],
            },
            indent=2,
            sort_keys=True,
        )


class _Tracker:
    """Keeps the worst ratio and its witness across trials."""

    def __init__(self):
        self.worst = 0.0
        self.witness = None

    def update(self, ratio, witness):
        if ratio > self.worst:
            self.worst = ratio
            self.witness = witness


# ---------------------------------------------------------------------------
# per-trial inequality evaluations
# ---------------------------------------------------------------------------

def _trial_curve_checks(curve, tag):
    """Ratios for the curve-geometry inequalities on one random curve."""
    g = geometry_fields(curve)
    ell = g.length
    h2 = h2_seminorm(g)
    out = {}

    pos_sup = np.hypot(g.nodes[:, 0], g.nodes[:, 1]).max()
    out["length_le_extent_curvature"] = ell / (pos_sup**2 * h2**2 * (1 + REL_SLACK) + ABS_SLACK)

    for beta in (0.5, 1.0):
        hol = c1beta_seminorm(g, beta)
        lower = 2.0 ** (1.0 + 1.0 / (2.0 * beta)) / hol ** (1.0 / beta)
        out[f"length_lower_bound_b{beta}"] = lower * (1 - REL_SLACK) / ell

        # T(s).T(s') >= 1 - hol^2 |s-s'|^(2 beta) / 2 - tol at all node pairs
        N = g.n
        ds = ell / N
        worst = 0.0
        T = np.asarray(g.tangent)
        for d in range(1, N // 2 + 1):
            dot = (T * np.roll(T, -d, axis=0)).sum(axis=1).min()
            floor = 1.0 - 0.5 * hol**2 * (d * ds) ** (2 * beta) - 1e-6
            worst = max(worst, floor - dot)
        out[f"tangent_alignment_b{beta}"] = 1.0 if worst > 0 else 0.0

    # positive self-separation for simple curves at the regularity window
    hol = c1beta_seminorm(g, 0.5)
    h = min(hol**-2, ell / 2.0)
    ds = ell / g.n
    kmin = max(1, min(int(np.ceil(h / ds)), g.n // 2))
    delta = _backend.window_min_dist(g.nodes, kmin, g.n // 2)
    out["self_separation_positive"] = 0.0 if delta > 0.0 else 2.0

    # window bound: the chord at separation h is at most h (plus grid error)
    out["window_chord_bound"] = delta / (kmin * ds + 2.0 * ds + ABS_SLACK)

    # length vs area over separation
    area = abs(enclosed_area(g))
    out["length_area_separation"] = ell / (30.0 * area / delta * (1 + REL_SLACK) + ABS_SLACK)

    return out


def _near_set_structure(curve, x, beta=0.5):
    """Interval-cover structure of the part of the curve near x.

    Returns (ratio, detail): ratio <= 1 when the cover uses at most
    len * hol^(1/beta) intervals (with slack), the intervals are disjoint up
    to one grid cell, and they cover the near set.
    """
    g = geometry_fields(curve)
    hol = c1beta_seminorm(g, beta)
    d0 = 0.25 * hol ** (-1.0 / beta)
    N = g.n
    ds = g.length / N
    dist = np.hypot(g.nodes[:, 0] - x[0], g.nodes[:, 1] - x[1])
    near = dist <= d0
    if not near.any():
        return 0.0, {"components": 0}
    # cyclic connected components of the near set
    idx = np.flatnonzero(near)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    comps = np.split(idx, breaks + 1)
    if len(comps) > 1 and idx[0] == 0 and idx[-1] == N - 1:
        comps[0] = np.concatenate([comps[-1], comps[0]])
        comps.pop()
    anchors = []
    for comp in comps:
        k = comp[np.argmin(dist[comp])]
        anchors.append(k)
    anchors = np.array(sorted(anchors))
    count_ratio = len(anchors) / (g.length * hol ** (1.0 / beta) * (1 + REL_SLACK))
    # disjointness: consecutive anchors at least 4 d0 apart (one-cell slack)
    if len(anchors) > 1:
        gaps = np.diff(np.append(anchors, anchors[0] + N)) * ds
        disjoint_ratio = (4.0 * d0 - ds) / gaps.min()
    else:
        disjoint_ratio = 0.0
    # covering: every near node within 2 d0 (+ one cell) of an anchor
    sep = np.abs(np.flatnonzero(near)[:, None] - anchors[None, :])
    sep = np.minimum(sep, N - sep) * ds
    cover_ratio = sep.min(axis=1).max() / (2.0 * d0 + ds)
    ratio = max(count_ratio, disjoint_ratio, cover_ratio)
    return ratio, {"components": len(anchors)}


def _trial_field_checks(rng, N, ell):
    """Ratios for the scalar-field inequalities on one random trig polynomial."""
    s = np.arange(N) * ell / N
    f = np.zeros(N)
    df = np.zeros(N)
    for k in range(1, 9):
        a, b = rng.normal(size=2) / k
        w = 2 * np.pi * k / ell
        f += a * np.cos(w * s) + b * np.sin(w * s)
        df += w * (-a * np.sin(w * s) + b * np.cos(w * s))
    ds = ell / N
    out = {}

    # maximal operator L2 bound with constant 4
    Mf = maximal_operator(f)
    out["maximal_l2_bound"] = np.sqrt((Mf**2).sum()) / (4.0 * np.sqrt((f**2).sum()) + ABS_SLACK)
    out["maximal_dominates"] = 1.0 if (Mf + 1e-12 < np.abs(f)).any() else 0.0

    # smoothing: Lp contraction and sup error against the Holder modulus
    curve_like = np.column_stack([f, -f])  # reuse the curve smoother on samples
    sigma, half_width = smoothing_profile(ell)
    r = 0.05
    halfw = max(1, int(np.ceil(r * half_width / ds)))
    offs = np.arange(-halfw, halfw + 1)
    w = sigma(offs * ds / r) / r * ds
    w /= w.sum()
    sm = np.zeros_like(f)
    for j, o in enumerate(offs):
        sm += w[j] * np.roll(f, -int(o))
    for p, name in ((1, "l1"), (2, "l2"), (np.inf, "sup")):
        if p == np.inf:
            lhs, rhs = np.abs(sm).max(), np.abs(f).max()
        else:
            lhs = (np.abs(sm) ** p).sum() ** (1 / p)
            rhs = (np.abs(f) ** p).sum() ** (1 / p)
        out[f"smoothing_contraction_{name}"] = lhs / (rhs * (1 + REL_SLACK) + ABS_SLACK)
    # sup error: |sm - f| <= r^beta ell1^beta |f|_(0,beta), beta = 1 with
    # |f|_(0,1) = sup|f'|
    holder1 = np.abs(df).max()
    out["smoothing_sup_error"] = np.abs(sm - f).max() / (
        r * half_width * holder1 * (1 + REL_SLACK) + ABS_SLACK
    )

    # sup interpolation: |f|_inf <= mean + sqrt(|f'|_2 |f - mean|_2)
    mean = f.mean()
    l2c = np.sqrt(((f - mean) ** 2).sum() * ds)
    l2d = np.sqrt((df**2).sum() * ds)
    bound = abs(mean) + np.sqrt(l2d * l2c)
    out["sup_interpolation"] = np.abs(f).max() / (bound * (1 + REL_SLACK) + ABS_SLACK)
    return out


def _velocity_bound_ratio(rng, alpha=1.0 / 6.0):
    """Sampled sup of the induced velocity against the area-strength bound."""
    n_p = int(rng.integers(1, 3))
    curves = []
    strengths = []
    for k in range(n_p):
        curves.append(random_fourier_curve(rng, N=128, center=(3.0 * k, 0.0)))
        strengths.append(float(rng.uniform(0.2, 2.0) * rng.choice([-1.0, 1.0])))
    fam = PatchFamily(curves, strengths, validate=False)
    W = max(enclosed_area(c) for c in fam.curves)
    const = 2.0 * np.pi ** (0.5 + alpha) / (1.0 - 2.0 * alpha)
    bound = const * sum(abs(t) for t in strengths) * W ** (0.5 - alpha)
    spec = KernelSpec(alpha, epsilon=0.0, quad_oversample=2)
    sup = 0.0
    for lam in range(n_p):
        u = velocity_on_boundary(fam, spec, lam)
        sup = max(sup, float(np.hypot(u[:, 0], u[:, 1]).max()))
    return sup / (bound * (1 + REL_SLACK))


def _mollification_rate_ratio(alpha):
    """Fitted decay exponent of the on-curve velocity mollification error."""
    from .scenarios import make_shape
    from .velocity import quadrature_sources, _sum_over_sources

    cur = make_shape("ellipse", {"a": 1.4, "b": 0.9}, 1024)
    fam = PatchFamily([cur], [1.0], validate=False)
    u0 = velocity_on_boundary(fam, KernelSpec(alpha, epsilon=0.0, quad_oversample=2), 0)
    src = [quadrature_sources(c.nodes, KernelSpec(alpha, epsilon=0.0, quad_oversample=2)) for c in fam.curves]
    epses = [0.2, 0.1, 0.05, 0.025]
    diffs = []
    for eps in epses:
        ue = _sum_over_sources(cur.nodes, src, fam.strengths, KernelSpec(alpha, epsilon=eps, quad_oversample=2))
        diffs.append(np.hypot(*(ue - u0).T).max())
    slope = np.polyfit(np.log(epses), np.log(diffs), 1)[0]
    return (0.9 * (1.0 - 2.0 * alpha)) / slope


def _crossing_refinement_ratios():
    """Self-separation of a figure-eight path under refinement.

    A path forced through a crossing has window separation shrinking to 0
    as the grid refines, while simple curves keep it bounded below.
    """
    vals = []
    for N in (128, 1024):
        t = np.arange(N) * 2 * np.pi / N
        # phases keep the crossing parameters off the grid
        path = np.column_stack([np.sin(2 * t + 0.3), np.sin(3 * t + 0.7)])
        vals.append(_backend.window_min_dist(path, max(1, N // 8), N // 2))
    return vals


# ---------------------------------------------------------------------------
# the suite
# ---------------------------------------------------------------------------

_DESCRIPTIONS = {
    "length_le_extent_curvature": "len <= sup|pos|^2 x curvature-energy",
    "length_lower_bound_b0.5": "len >= 2^(1+1/(2b)) / holder^(1/b), b=1/2",
    "length_lower_bound_b1.0": "len >= 2^(1+1/(2b)) / holder^(1/b), b=1",
    "tangent_alignment_b0.5": "T(s).T(s') >= 1 - holder^2 |s-s'|^(2b) / 2, b=1/2",
    "tangent_alignment_b1.0": "T(s).T(s') >= 1 - holder^2 |s-s'|^(2b) / 2, b=1",
    "self_separation_positive": "simple curves have positive window separation",
    "window_chord_bound": "window separation is at most the window itself",
    "length_area_separation": "len <= 30 area / window separation",
    "near_set_structure": "near-set of a point covered by few disjoint intervals",
    "velocity_sup_bound": "sup|u| <= c_a C_a |strengths| area^(1/2-a)",
    "smoothing_contraction_l1": "smoothing contracts L1",
    "smoothing_contraction_l2": "smoothing contracts L2",
    "smoothing_contraction_sup": "smoothing contracts sup",
    "smoothing_sup_error": "smoothing error <= r x support x Lipschitz modulus",
    "sup_interpolation": "sup f <= mean + sqrt(|f'|_2 |f-mean|_2)",
    "maximal_l2_bound": "maximal operator L2-bounded with constant 4",
    "maximal_dominates": "maximal operator dominates |f| pointwise",
    "mollification_rate_a1/12": "velocity cutoff error decays like eps^(1-2a), a=1/12",
    "mollification_rate_a1/6": "velocity cutoff error decays like eps^(1-2a), a=1/6",
    "crossing_separation_vanishes": "window separation of a crossing path vanishes under refinement",
}


def check_suite(seed: int, trials: int, N: int = 256, threads: int = 1) -> SuiteReport:
    """Run every inequality on `trials` seeded random curves and fields.

    Deterministic given (seed, trials, N); trials are independent and may be
    evaluated in parallel without changing the report.
    """
    report = SuiteReport(seed=seed, trials=trials, N=N, backend=_backend.backend_name())
    trackers = {cid: _Tracker() for cid in _DESCRIPTIONS}
    seqs = np.random.SeedSequence(seed).spawn(trials)

    def one_trial(k):
        rng = np.random.default_rng(seqs[k])
        curve = random_fourier_curve(rng, N=N)
        vals = _trial_curve_checks(curve, k)
        g = geometry_fields(curve)
        s_star = rng.uniform(0.0, g.length)
        node = g.nodes[int(s_star / g.length * g.n) % g.n]
        offset = rng.normal(size=2)
        offset *= rng.uniform(0.0, 0.3) / np.hypot(*offset)
        ratio, _ = _near_set_structure(curve, node + offset)
        vals["near_set_structure"] = ratio
        vals.update(_trial_field_checks(rng, N, g.length))
        if k < 50:
            vals["velocity_sup_bound"] = _velocity_bound_ratio(rng)
        return k, vals

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one_trial, range(trials)))
    else:
        results = [one_trial(k) for k in range(trials)]
    for k, vals in results:
        for cid, ratio in vals.items():
            trackers[cid].update(float(ratio), {"trial": k})

    for label, alpha in (("a1/12", 1.0 / 12.0), ("a1/6", 1.0 / 6.0)):
        trackers[f"mollification_rate_{label}"].update(
            float(_mollification_rate_ratio(alpha)), {"alpha": alpha}
        )
    coarse, fine = _crossing_refinement_ratios()
    trackers["crossing_separation_vanishes"].update(
        float(fine / max(0.25 * coarse, 1e-12)), {"coarse": coarse, "fine": fine}
    )

    for cid, desc in _DESCRIPTIONS.items():
        tr = trackers[cid]
        report.checks.append(
            CheckResult(
                check_id=cid,
                description=desc,
                passed=tr.worst <= 1.0,
                worst_ratio=tr.worst,
                trials=trials,
                witness=tr.witness if tr.worst > 1.0 else None,
            )
        )
    return report
