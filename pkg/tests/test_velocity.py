import numpy as np
import pytest

from gsqglab.curves import ClosedCurve, fft_derivative, geometry_fields
from gsqglab.errors import SingularEvaluation, TooCloseToBoundary
from gsqglab.scenarios import doubly_odd_preset, make_shape, random_fourier_curve
from gsqglab.velocity import (
    KernelSpec,
    PatchFamily,
    area_velocity,
    area_velocity_polar,
    contour_velocity,
    kernel_eval,
    tangential_derivative,
    velocity_on_boundary,
)

from conftest import circle

ALPHA = 1.0 / 6.0


def spec(eps=0.0, alpha=ALPHA, c_alpha=1.0, oversample=2):
    return KernelSpec(alpha=alpha, c_alpha=c_alpha, epsilon=eps, quad_oversample=oversample)


# ---------------------------------------------------------------------------
# kernel point values
# ---------------------------------------------------------------------------

def test_kernel_point_values():
    s = spec(eps=0.0)
    assert kernel_eval(s, (1.0, 0.0)) == pytest.approx(3.0, rel=1e-14)
    assert kernel_eval(s, (8.0, 0.0)) == pytest.approx(1.5, rel=1e-14)


def test_kernel_mollified_support():
    s = spec(eps=0.1)
    s0 = spec(eps=0.0)
    for r in (0.1, 0.15, 1.0):
        assert kernel_eval(s, (r, 0.0)) == pytest.approx(kernel_eval(s0, (r, 0.0)), rel=1e-14)
    for r in (0.01, 0.049, 0.05):
        assert kernel_eval(s, (r, 0.0)) == 0.0
    assert 0.0 <= kernel_eval(s, (0.07, 0.0)) <= kernel_eval(s0, (0.07, 0.0))


def test_kernel_singular_origin():
    with pytest.raises(SingularEvaluation):
        kernel_eval(spec(eps=0.0), (0.0, 0.0))
    assert kernel_eval(spec(eps=0.1), (0.0, 0.0)) == 0.0


# ---------------------------------------------------------------------------
# contour velocity at points
# ---------------------------------------------------------------------------

def test_circle_center_is_stagnation():
    fam = PatchFamily([circle(1.0, 256)], [1.0])
    u = contour_velocity(fam, spec(eps=0.0), (0.0, 0.0))
    assert np.abs(u).max() <= 1e-12


def test_too_close_to_boundary_guard():
    fam = PatchFamily([circle(1.0, 128)], [1.0])
    with pytest.raises(TooCloseToBoundary):
        contour_velocity(fam, spec(eps=0.0), (1.0 + 1e-5, 0.0))
    # mollified evaluation is fine anywhere
    contour_velocity(fam, spec(eps=0.1), (1.0 + 1e-5, 0.0))


def test_exterior_point_velocity_tangential_and_oracle_match():
    # at (2,0) outside a unit circular patch the velocity must be vertical
    # (counterclockwise for positive strength), and its magnitude must match
    # a high-resolution quadrature of the area integral. For the disc the
    # area integral is computed spectrally in polar coordinates.
    fam = PatchFamily([circle(1.0, 1024)], [1.0])
    u = contour_velocity(fam, spec(eps=0.0), (2.0, 0.0))
    assert abs(u[0]) <= 1e-10
    assert u[1] > 0.0

    x = np.array([2.0, 0.0])
    rho_gl, w_gl = np.polynomial.legendre.leggauss(200)
    rho = 0.5 * (rho_gl + 1.0)
    w_rho = 0.5 * w_gl
    M = 2048
    psi = np.arange(M) * 2 * np.pi / M
    y = rho[:, None, None] * np.stack([np.cos(psi), np.sin(psi)], axis=-1)[None, :, :]
    d = x[None, None, :] - y
    r = np.hypot(d[..., 0], d[..., 1])
    f = np.stack([-d[..., 1], d[..., 0]], axis=-1) / (r ** (2 + 2 * ALPHA))[..., None]
    oracle = ((f * rho[:, None, None]).sum(axis=1) * (2 * np.pi / M) * w_rho[:, None]).sum(axis=0)
    assert abs(np.hypot(*u) - np.hypot(*oracle)) <= 1e-6 * np.hypot(*oracle)


def test_mirror_family_axis_symmetry():
    fam = doubly_odd_preset(N=128)
    s = spec(eps=0.1)
    for x in ((0.5, 0.0), (3.0, 0.0), (-1.2, 0.0)):
        u = contour_velocity(fam, s, x)
        assert abs(u[1]) <= 1e-10 * max(1.0, abs(u[0]))


def test_velocity_linarity_in_strength():
    cur = make_shape("fourier", {"r0": 1.0, "cos": {2: 0.1}}, 128)
    x = (1.7, 0.4)
    u1 = contour_velocity(PatchFamily([cur], [1.0]), spec(eps=0.1), x)
    u2 = contour_velocity(PatchFamily([cur], [2.0]), spec(eps=0.1), x)
    assert np.abs(u2 - 2.0 * u1).max() == 0.0


# ---------------------------------------------------------------------------
# area-integral velocity (oracle route)
# ---------------------------------------------------------------------------

def test_area_velocity_center_zero():
    fam = PatchFamily([circle(1.0, 256)], [1.0])
    u = area_velocity(fam, spec(), (0.0, 0.0))
    assert np.abs(u).max() <= 1e-6


def test_area_velocity_matches_contour():
    fam = PatchFamily([circle(1.0, 512)], [1.0])
    x = (2.0, 0.0)
    ua = area_velocity(fam, spec(), x)
    uc = contour_velocity(fam, spec(eps=0.0), x)
    assert np.abs(ua - uc).max() <= 1e-4 * np.hypot(*uc)


def test_area_velocity_polar_matches_cells():
    fam = PatchFamily([make_shape("ellipse", {"a": 2.0, "b": 1.0}, 512)], [1.0])
    for x in ((2.8, 0.4), (0.5, 1.4), (-3.0, -0.5)):
        ua = area_velocity(fam, spec(), x)
        up = area_velocity_polar(fam, spec(), x)
        assert np.abs(ua - up).max() <= 2e-4 * np.hypot(*up)


def test_area_velocity_linear_in_strength():
    fam1 = PatchFamily([circle(1.0, 128)], [1.0])
    fam2 = PatchFamily([circle(1.0, 128)], [2.0])
    x = (1.8, 0.3)
    u1 = area_velocity(fam1, spec(), x)
    u2 = area_velocity(fam2, spec(), x)
    assert np.abs(u2 - 2.0 * u1).max() == 0.0


# ---------------------------------------------------------------------------
# on-boundary velocity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_circle_boundary_velocity_tangential(eps):
    fam = PatchFamily([circle(1.0, 256)], [1.0])
    u = velocity_on_boundary(fam, spec(eps=eps), 0)
    c = fam.curves[0]
    un = (u * c.normal).sum(axis=1)
    ut = (u * c.tangent).sum(axis=1)
    assert np.abs(un).max() <= 1e-4 * np.abs(ut).max()


def test_circle_boundary_speed_uniform():
    fam = PatchFamily([circle(1.0, 256)], [1.0])
    u = velocity_on_boundary(fam, spec(eps=0.0), 0)
    ut = (u * fam.curves[0].tangent).sum(axis=1)
    assert (ut.max() - ut.min()) <= 1e-3 * np.abs(ut).max()


def test_uniform_velocity_bound_random_families():
    # |u| <= c_a * 2 pi^(1/2+a)/(1-2a) * |theta| * maxarea^(1/2-a), sampled
    # at all boundary nodes of 50 random families
    rng = np.random.default_rng(42)
    s = spec(eps=0.0)
    const = 2.0 * np.pi ** (0.5 + ALPHA) / (1.0 - 2.0 * ALPHA)
    for _ in range(50):
        n_p = rng.integers(1, 3)
        curves = []
        strengths = []
        for k in range(n_p):
            c = random_fourier_curve(rng, N=128, center=(3.0 * k, 0.0))
            curves.append(c)
            strengths.append(rng.uniform(0.2, 2.0) * rng.choice([-1.0, 1.0]))
        fam = PatchFamily(curves, strengths)
        from gsqglab.curves import enclosed_area

        W = max(enclosed_area(c) for c in fam.curves)
        bound = const * sum(abs(t) for t in strengths) * W ** (0.5 - ALPHA)
        for lam in range(n_p):
            u = velocity_on_boundary(fam, s, lam)
            assert np.hypot(u[:, 0], u[:, 1]).max() <= bound


def test_mollification_error_rate():
    # on-curve |u_eps - u_0| decays like eps^(1-2a); both fields use the same
    # staggered quadrature so the difference isolates the kernel cutoff
    cur = make_shape("ellipse", {"a": 1.4, "b": 0.9}, 2048)
    fam = PatchFamily([cur], [1.0])
    for alpha, floor in ((1.0 / 12.0, 0.9 * (1 - 1.0 / 6.0)), (1.0 / 6.0, 0.9 * (2.0 / 3.0))):
        diffs = []
        epses = [0.2, 0.1, 0.05, 0.025]
        u0 = velocity_on_boundary(fam, KernelSpec(alpha, epsilon=0.0, quad_oversample=2), 0)
        for eps in epses:
            s_eps = KernelSpec(alpha, epsilon=eps, quad_oversample=2)
            # evaluate the mollified kernel on the same staggered sources
            from gsqglab.velocity import quadrature_sources, _sum_over_sources

            src = [quadrature_sources(c.nodes, KernelSpec(alpha, epsilon=0.0, quad_oversample=2)) for c in fam.curves]
            ue = _sum_over_sources(cur.nodes, src, fam.strengths, s_eps)
            diffs.append(np.hypot(*(ue - u0).T).max())
        slope = np.polyfit(np.log(epses), np.log(diffs), 1)[0]
        assert slope >= floor


def test_divergence_free_flux():
    # net flux of the induced field through a small circle away from patches
    fam = PatchFamily([make_shape("fourier", {"r0": 1.0, "cos": {3: 0.08}}, 256)], [1.3])
    s = spec(eps=0.0)
    M = 256
    th = np.arange(M) * 2 * np.pi / M
    rho = 0.25
    center = np.array([2.2, 0.6])
    pts = center + rho * np.column_stack([np.cos(th), np.sin(th)])
    u = contour_velocity(fam, s, pts)
    nrm = np.column_stack([np.cos(th), np.sin(th)])
    flux = (u * nrm).sum() * (2 * np.pi * rho / M)
    scale = np.hypot(u[:, 0], u[:, 1]).max() * 2 * np.pi * rho
    assert abs(flux) <= 1e-6 * scale


# ---------------------------------------------------------------------------
# tangential derivative of the boundary velocity
# ---------------------------------------------------------------------------

def test_tangential_derivative_circle():
    # self-induced motion of a circular patch is a rigid rotation: the
    # tangential component of the derivative vanishes identically, and the
    # normal component recovers speed times curvature at the unmollified
    # scheme's O(N^(2a-1)) accuracy
    def components(N):
        fam = PatchFamily([circle(1.0, N)], [1.0])
        du = tangential_derivative(fam, spec(eps=0.0), 0)
        c = fam.curves[0]
        u = velocity_on_boundary(fam, spec(eps=0.0), 0)
        ut = (u * c.tangent).sum(axis=1).mean()
        dt_comp = np.abs((du * c.tangent).sum(axis=1)).max()
        dn_err = np.abs((du * c.normal).sum(axis=1) - ut).max()
        return ut, dt_comp, dn_err

    ut, dt_comp, dn_err = components(256)
    assert dt_comp <= 1e-3 * abs(ut)
    assert dn_err <= 2.5e-2 * abs(ut)
    ut2, _, dn_err2 = components(1024)
    assert dn_err2 <= 0.5 * dn_err  # slow singular-scheme rate, but converging


def test_tangential_derivative_matches_spectral():
    a = make_shape("fourier", {"r0": 1.0, "cos": {2: 0.08}}, 256)
    b = make_shape("fourier", {"r0": 0.8, "sin": {3: 0.05}, "center": (2.6, 0.2)}, 256)
    fam = PatchFamily([a, b], [1.0, -0.7])
    s = spec(eps=0.1)
    for lam in range(2):
        du = tangential_derivative(fam, s, lam)
        u = velocity_on_boundary(fam, s, lam)
        c = fam.curves[lam]
        du_spectral = fft_derivative(u) / c.length
        scale = np.abs(du_spectral).max()
        assert np.abs(du - du_spectral).max() <= 1e-3 * scale


def test_tangential_derivative_linear():
    a = make_shape("fourier", {"r0": 1.0, "cos": {2: 0.08}}, 128)
    s = spec(eps=0.1)
    d1 = tangential_derivative(PatchFamily([a], [1.0]), s, 0)
    d2 = tangential_derivative(PatchFamily([a], [2.0]), s, 0)
    assert np.abs(d2 - 2.0 * d1).max() == 0.0
