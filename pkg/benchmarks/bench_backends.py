"""Benchmark the compiled hot kernels against the NumPy fallback.

Usage: python benchmarks/bench_backends.py [N]
"""

import sys
import time

import numpy as np

from gsqglab import _backend
from gsqglab._backend import _numpy


def curve(N, r0=1.0, center=(0.0, 0.0)):
    t = np.arange(N) * 2 * np.pi / N
    r = r0 + 0.1 * np.cos(3 * t)
    return np.ascontiguousarray(
        np.column_stack([r * np.cos(t) + center[0], r * np.sin(t) + center[1]])
    )


def bench(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    N = int(sys.argv[1]) if len(sys.argv) > 1 else 512
    try:
        core = _backend.get_impl("compiled")
    except ImportError:
        print("compiled backend unavailable; build the extension first")
        return 1
    src = curve(N)
    targets = curve(N, r0=1.6, center=(0.2, 0.1))
    dsrc = np.ascontiguousarray(np.roll(src, -1, axis=0) - src)
    tv = np.ascontiguousarray(targets / np.hypot(targets[:, 0], targets[:, 1])[:, None])
    f = np.abs(np.sin(np.arange(N) * 0.37))

    cases = [
        ("velocity_sum eps=0.1", lambda m: m.velocity_sum(targets, src, dsrc, 1 / 6, 1.0, 0.1)),
        ("velocity_sum eps=0", lambda m: m.velocity_sum(targets, src, dsrc, 1 / 6, 1.0, 0.0)),
        ("dvelocity_sum", lambda m: m.dvelocity_sum(targets, tv, src, dsrc, 1 / 6, 1.0, 0.1)),
        ("discrete_frechet", lambda m: m.discrete_frechet_cyclic(targets, src)),
        ("polyline_min_dist", lambda m: m.polyline_min_dist(targets, src)),
        ("window_min_dist", lambda m: m.window_min_dist(src, 4, N // 2)),
        ("point_polyline_dist", lambda m: m.point_polyline_dist(targets, src)),
        ("tangent_pair_sup", lambda m: m.tangent_pair_sup(tv, 0.01, 0.5)),
        ("winding_inside", lambda m: m.winding_inside(targets, src)),
        ("self_intersects", lambda m: m.self_intersects(src)),
        ("maximal_op", lambda m: m.maximal_op(f)),
    ]
    print(f"N = {N}")
    print(f"{'kernel':<22} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, fn in cases:
        t_np = bench(fn, _numpy)
        t_c = bench(fn, core)
        print(f"{name:<22} {t_np * 1e3:>9.2f}ms {t_c * 1e3:>9.2f}ms {t_np / t_c:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
