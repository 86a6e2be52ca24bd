import numpy as np
import pytest

from gsqglab.curves import ClosedCurve, geometry_fields
from gsqglab.scenarios import make_shape, random_fourier_curve


@pytest.fixture
def unit_circle():
    return make_shape("circle", {"radius": 1.0}, 128)


@pytest.fixture
def ellipse21():
    return make_shape("ellipse", {"a": 2.0, "b": 1.0}, 256)


def circle(radius=1.0, N=128, center=(0.0, 0.0)):
    return make_shape("circle", {"radius": radius, "center": center}, N)


def angle_sampled_ellipse(a, b, N):
    """Ellipse sampled uniformly in angle (not constant speed)."""
    th = np.arange(N) * 2.0 * np.pi / N
    return ClosedCurve(np.column_stack([a * np.cos(th), b * np.sin(th)]), "general")


def rng_curves(seed, n, N=256):
    rng = np.random.default_rng(seed)
    return [random_fourier_curve(rng, N=N) for _ in range(n)]
