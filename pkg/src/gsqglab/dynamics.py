"""Time integration of the mollified patch evolution with diagnostics.

The node positions of all curves follow the family-induced boundary velocity
(classical RK4); every accepted step is followed by a constant-speed
resampling, which changes only the parametrization, not the modeled curve.
The monitored functionals are the strength-weighted curvature energy Q, the
maximal patch area W, and the composite functional L whose blow-up controls
loss of regularity; the growth monitor tracks the finite-difference rate
of L against L^(3+2a).
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import io as _io
from .curves import ClosedCurve, enclosed_area, fft_derivative, geometry_fields, h2_seminorm, resample_constant_speed
from .errors import NotSimple, StepRejected, TopologyBreach
from .metrics import pair_distance, self_distance, sigma_set, touch_threshold
from .velocity import KernelSpec, PatchFamily, velocity_at_nodes, velocity_on_boundary


# ---------------------------------------------------------------------------
# state and diagnostics containers
# ---------------------------------------------------------------------------

@dataclass
class DiagnosticsRecord:
    t: float
    Q: float
    W: float
    L: float
    u_inf: float
    min_pair_delta: float
    min_self_delta: float
    growth_ratio: float
    areas: list
    h2: list


@dataclass
class SimState:
    t: float
    family: PatchFamily
    spec: KernelSpec
    diagnostics: DiagnosticsRecord | None = None

    @property
    def grid_spacing(self):
        return min(c.length / c.n for c in self.family.curves)


# ---------------------------------------------------------------------------
# right-hand side and stepping
# ---------------------------------------------------------------------------

def rhs(state: SimState):
    """Boundary velocity sampled at every node of every curve."""
    nodes = [c.nodes for c in state.family.curves]
    return velocity_at_nodes(nodes, state.family.strengths, state.spec)


def _rhs_raw(node_arrays, strengths, spec):
    return velocity_at_nodes(node_arrays, strengths, spec)


def step(state: SimState, dt: float, cfl: float = 0.5, k1=None) -> SimState:
    """One RK4 step of all node positions, then constant-speed resampling.

    Raises StepRejected when dt violates the CFL bound, and TopologyBreach
    when a curve self-crosses after the update.
    """
    if dt < 0.0:
        raise ValueError("dt must be nonnegative")
    strengths = state.family.strengths
    spec = state.spec
    y0 = [c.nodes for c in state.family.curves]
    if k1 is None:
        k1 = _rhs_raw(y0, strengths, spec)
    if dt == 0.0:
        return state
    u_inf = max(np.hypot(u[:, 0], u[:, 1]).max() for u in k1)
    if u_inf > 0.0 and dt > cfl * state.grid_spacing / u_inf:
        raise StepRejected(f"dt={dt:.3g} exceeds cfl bound {cfl * state.grid_spacing / u_inf:.3g}")
    k2 = _rhs_raw([y + 0.5 * dt * k for y, k in zip(y0, k1)], strengths, spec)
    k3 = _rhs_raw([y + 0.5 * dt * k for y, k in zip(y0, k2)], strengths, spec)
    k4 = _rhs_raw([y + dt * k for y, k in zip(y0, k3)], strengths, spec)
    new_curves = []
    for y, a, b, c, d, cur in zip(y0, k1, k2, k3, k4, state.family.curves):
        moved = y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        new_curves.append(resample_constant_speed(ClosedCurve(moved, "general"), cur.n))
    try:
        fam = state.family.with_curves(new_curves)
    except NotSimple as exc:
        raise TopologyBreach(str(exc)) from exc
    return SimState(state.t + dt, fam, spec, state.diagnostics)


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

GROWTH_EXPONENT_OFFSET = 3.0  # rate of L is monitored against L^(3+2a)


def functionals(state: SimState, sigma=None, u_samples=None) -> DiagnosticsRecord:
    """Evaluate the monitored functionals at the current state.

    sigma: optional precomputed controllable-pair sets (they are invariants
    of the flow, so runs compute them once at the start).
    """
    fam = state.family
    L_idx = range(len(fam))
    if sigma is None:
        sigma = {lam: sigma_set(fam, lam) for lam in L_idx}
    h2 = [h2_seminorm(c) for c in fam.curves]
    areas = [enclosed_area(c) for c in fam.curves]
    m = fam.min_strength
    Q = sum(abs(t) * v**2 for t, v in zip(fam.strengths, h2)) / m
    W = max(areas)
    # self-separation at window 1/Q (undefined when 1/Q exceeds len/2)
    self_terms = []
    self_deltas = []
    for lam, c in zip(L_idx, fam.curves):
        h = 1.0 / Q
        if h <= c.length / 2.0:
            d = self_distance(c, h)
            self_deltas.append(d)
            self_terms.append(np.inf if d == 0.0 else 1.0 / d)
    pair_terms = []
    pair_deltas = []
    for lam in L_idx:
        for lam2 in L_idx:
            if lam2 == lam or lam2 in sigma[lam]:
                continue
            d = pair_distance(fam.curves[lam], fam.curves[lam2])
            pair_deltas.append(d)
            pair_terms.append(np.inf if d == 0.0 else 1.0 / d)
    L_val = max([2.0 * Q] + self_terms + pair_terms)
    if u_samples is None:
        u_samples = rhs(state)
    u_inf = max(np.hypot(u[:, 0], u[:, 1]).max() for u in u_samples)
    return DiagnosticsRecord(
        t=state.t,
        Q=Q,
        W=W,
        L=L_val,
        u_inf=u_inf,
        min_pair_delta=min(pair_deltas) if pair_deltas else np.inf,
        min_self_delta=min(self_deltas) if self_deltas else np.nan,
        growth_ratio=np.nan,
        areas=areas,
        h2=h2,
    )


def ddt_h2(state: SimState, lam: int) -> float:
    """Exact instantaneous rate of the squared curvature energy of curve lam.

    Combines the curvature-weighted normal component of the second
    arclength derivative of the boundary velocity with the stretching term
    from its tangential derivative.
    """
    fam = state.family
    c = fam.curves[lam]
    u = velocity_on_boundary(fam, state.spec, lam)
    du = fft_derivative(u) / c.length
    d2u = fft_derivative(u, order=2) / c.length**2
    ds = c.length / c.n
    term1 = 2.0 * (c.curvature * (d2u * c.normal).sum(axis=1)).sum() * ds
    term2 = 3.0 * (c.curvature**2 * (du * c.tangent).sum(axis=1)).sum() * ds
    return float(term1 - term2)


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    status: str  # ok | ceiling | topology_breach
    records: list
    final: SimState
    perturbed_initially: bool = False
    growth_constant: float = np.nan  # max positive FD rate of L over L^(3+2a)
    message: str = ""


def _maybe_separate_touching(family, cfg):
    """Shrink curves inward when an uncontrollable pair touches discretely."""
    from .scenarios import separate_nested
    from .metrics import classify_relation

    n = len(family)
    sigma = {lam: sigma_set(family, lam) for lam in range(n)}
    touching = False
    for lam in range(n):
        for lam2 in range(n):
            if lam2 == lam or lam2 in sigma[lam]:
                continue
            if pair_distance(family.curves[lam], family.curves[lam2]) < touch_threshold(
                family.curves[lam], family.curves[lam2]
            ):
                touching = True
    if not touching:
        return family, False
    # order by containment (inner first), then apply the shrinking recipe
    order = list(range(n))

    def contains(i, j):
        return classify_relation(family.curves[j], family.curves[i]).kind == "nested_1_in_2"

    order.sort(key=lambda i: sum(contains(i, j) for j in range(n) if j != i))
    eps = 0.25 * min(
        touch_threshold(family.curves[i], family.curves[j]) for i in range(n) for j in range(n) if i != j
    )
    separated = separate_nested([family.curves[i] for i in order], eps)
    curves = [None] * n
    for pos, i in enumerate(order):
        curves[i] = separated[pos]
    return PatchFamily(curves, family.strengths), True


def run(cfg, out_dir=None, family=None) -> RunResult:
    """Integrate a scenario to t_end, recording diagnostics and snapshots.

    Stops early when L exceeds its ceiling ('ceiling') or a curve
    self-crosses ('topology_breach'); otherwise returns status 'ok'.
    """
    from .scenarios import build_family

    if family is None:
        family = build_family(cfg)
    eps = cfg.epsilon
    if eps is None:
        diam = min(float(np.ptp(c.nodes, axis=0).max()) for c in family.curves)
        eps = 0.1 * diam
    spec = KernelSpec(cfg.alpha, cfg.c_alpha, eps, quad_oversample=cfg.quad_oversample)
    family, perturbed = _maybe_separate_touching(family, cfg)
    state = SimState(0.0, family, spec)
    sigma = {lam: sigma_set(family, lam) for lam in range(len(family))}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        viewport = _io.frame_viewport(family)

    records = []
    status = "ok"
    message = ""
    p_exp = GROWTH_EXPONENT_OFFSET + 2.0 * cfg.alpha
    growth_c = 0.0

    def record(u_samples):
        rec = functionals(state, sigma=sigma, u_samples=u_samples)
        if records:
            prev = records[-1]
            dtv = rec.t - prev.t
            if dtv > 0 and np.isfinite(prev.L) and np.isfinite(rec.L):
                rec.growth_ratio = (rec.L - prev.L) / dtv / prev.L**p_exp
        records.append(rec)
        if out_dir is not None:
            idx = len(records) - 1
            _io.write_snapshots(state.family, idx, rec.t, out_dir)
            _io.write_svg_frame(state.family, viewport, os.path.join(out_dir, f"frame_{idx:04d}.svg"))
        return rec

    u = rhs(state)
    rec = record(u)
    ceiling = cfg.ceiling_L if cfg.ceiling_L is not None else 1e3 * rec.L
    n_step = 0
    while state.t < cfg.t_end - 1e-14:
        u_inf = max(np.hypot(v[:, 0], v[:, 1]).max() for v in u)
        dt = cfg.t_end - state.t
        if u_inf > 0.0:
            dt = min(dt, cfg.cfl * state.grid_spacing / u_inf)
        for _ in range(40):
            try:
                state = step(state, dt, cfl=cfg.cfl, k1=u)
                break
            except StepRejected:
                dt *= 0.5
            except TopologyBreach as exc:
                status = "topology_breach"
                message = str(exc)
                break
        else:
            status = "topology_breach"
            message = "time step underflow"
        if status != "ok":
            break
        n_step += 1
        u = rhs(state)
        if n_step % cfg.output_every == 0 or state.t >= cfg.t_end - 1e-14:
            rec = record(u)
            if np.isfinite(rec.growth_ratio) and rec.growth_ratio > growth_c:
                growth_c = rec.growth_ratio
            if rec.L >= ceiling:
                status = "ceiling"
                message = f"L={rec.L:.6g} reached ceiling {ceiling:.6g}"
                break
    if status != "ok" and records and records[-1].t < state.t:
        record(rhs(state))
    if out_dir is not None:
        _io.write_diagnostics_csv(records, len(family), os.path.join(out_dir, "diagnostics.csv"))
    return RunResult(
        status=status,
        records=records,
        final=state,
        perturbed_initially=perturbed,
        growth_constant=growth_c,
        message=message,
    )
