"""The compiled and NumPy kernels must agree to reassociation accuracy."""

import numpy as np
import pytest

from gsqglab import _backend
from gsqglab._backend import _numpy

pytestmark = pytest.mark.skipif(
    _backend.backend_name() != "compiled", reason="compiled backend not built"
)

core = _backend.get_impl("compiled")
rng = np.random.default_rng(123)


def closed_curve(N, r0=1.0, wob=0.1, center=(0.0, 0.0)):
    t = np.arange(N) * 2 * np.pi / N
    r = r0 + wob * np.cos(3 * t) + 0.05 * np.sin(5 * t)
    return np.ascontiguousarray(
        np.column_stack([r * np.cos(t) + center[0], r * np.sin(t) + center[1]])
    )


def test_chi_profiles_agree():
    t = np.linspace(-2.0, 2.0, 10_001)
    assert np.abs(core.chi_default(t) - _numpy.chi_default(t)).max() <= 1e-15
    assert np.abs(core.chi_default_deriv(np.abs(t)) - _numpy.chi_default_deriv(np.abs(t))).max() <= 1e-12


@pytest.mark.parametrize("eps", [0.0, 0.15])
def test_velocity_sum_agree(eps):
    src = closed_curve(256)
    targets = closed_curve(128, r0=2.0) if eps else closed_curve(128, r0=2.0)
    dsrc = np.ascontiguousarray(np.roll(src, -1, axis=0) - src)
    a = core.velocity_sum(targets, src, dsrc, 1.0 / 6.0, 1.0, eps)
    b = _numpy.velocity_sum(targets, src, dsrc, 1.0 / 6.0, 1.0, eps)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


@pytest.mark.parametrize("eps", [0.0, 0.15])
def test_dvelocity_sum_agree(eps):
    src = closed_curve(256)
    targets = closed_curve(128, r0=2.0)
    tv = np.ascontiguousarray(np.column_stack([-np.sin(np.arange(128)), np.cos(np.arange(128))]))
    dsrc = np.ascontiguousarray(np.roll(src, -1, axis=0) - src)
    a = core.dvelocity_sum(targets, tv, src, dsrc, 1.0 / 6.0, 1.0, eps)
    b = _numpy.dvelocity_sum(targets, tv, src, dsrc, 1.0 / 6.0, 1.0, eps)
    assert np.abs(a - b).max() <= 1e-11 * np.abs(b).max()


def test_point_polyline_agree():
    pts = rng.normal(size=(200, 2)) * 2.0
    poly = closed_curve(128)
    da, sa, pa = core.point_polyline_dist(np.ascontiguousarray(pts), poly)
    db, sb, pb = _numpy.point_polyline_dist(pts, poly)
    assert np.abs(da - db).max() <= 1e-13
    assert (sa == sb).all()
    assert np.abs(pa - pb).max() <= 1e-12


def test_polyline_min_dist_agree():
    A = closed_curve(128)
    B = closed_curve(96, r0=2.5, center=(0.3, 0.2))
    assert core.polyline_min_dist(A, B) == pytest.approx(_numpy.polyline_min_dist(A, B), abs=1e-14)
    C = closed_curve(96, r0=1.0, center=(0.5, 0.0))  # crossing pair
    assert core.polyline_min_dist(A, C) == _numpy.polyline_min_dist(A, C) == 0.0


def test_window_min_dist_agree():
    A = closed_curve(256)
    assert core.window_min_dist(A, 7, 128) == pytest.approx(_numpy.window_min_dist(A, 7, 128), abs=1e-15)


def test_tangent_pair_sup_agree():
    t = np.arange(256) * 2 * np.pi / 256
    T = np.ascontiguousarray(np.column_stack([-np.sin(t), np.cos(t)]))
    for beta in (0.5, 1.0):
        assert core.tangent_pair_sup(T, 0.01, beta) == pytest.approx(
            _numpy.tangent_pair_sup(T, 0.01, beta), rel=1e-13
        )


def test_winding_and_crossing_agree():
    poly = closed_curve(128)
    pts = np.ascontiguousarray(rng.normal(size=(500, 2)))
    assert (core.winding_inside(pts, poly) == _numpy.winding_inside(pts, poly)).all()
    B = closed_curve(96, r0=1.0, center=(0.5, 0.0))
    assert core.any_proper_crossing(poly, B) == _numpy.any_proper_crossing(poly, B) is True
    far = closed_curve(96, center=(5.0, 0.0))
    assert core.any_proper_crossing(poly, far) == _numpy.any_proper_crossing(poly, far) is False
    assert core.self_intersects(poly) == _numpy.self_intersects(poly) is False
    t = np.arange(64) * 2 * np.pi / 64
    eight = np.ascontiguousarray(np.column_stack([np.sin(2 * t + 0.3), np.sin(t + 0.9)]))
    assert core.self_intersects(eight) == _numpy.self_intersects(eight) is True


def test_frechet_agree():
    for _ in range(5):
        A = closed_curve(96, wob=float(rng.uniform(0, 0.2)))
        B = closed_curve(
            128, r0=float(rng.uniform(0.8, 2.0)), center=(float(rng.normal()), float(rng.normal()))
        )
        va = core.discrete_frechet_cyclic(A, B)
        vb = _numpy.discrete_frechet_cyclic(A, B)
        assert va == pytest.approx(vb, rel=1e-13)


def test_maximal_agree():
    f = rng.normal(size=257)[:256]
    assert np.abs(core.maximal_op(f) - _numpy.maximal_op(f)).max() <= 1e-13
