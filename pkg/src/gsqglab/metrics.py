"""Distances and separation functionals between and within closed curves."""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .curves import ClosedCurve, geometry_fields, winding_number
from .errors import InvalidWindow


@dataclass(frozen=True)
class RelationClass:
    """Containment relation between two simple closed curves."""

    kind: str  # nested_1_in_2 | nested_2_in_1 | disjoint | overlapping

    def nested(self):
        return self.kind in ("nested_1_in_2", "nested_2_in_1")


def pair_distance(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Min distance between the two curve images (0 if the polylines meet)."""
    return float(_backend.polyline_min_dist(c1.nodes, c2.nodes))


def self_distance(curve: ClosedCurve, h: float) -> float:
    """Min chord between points at cyclic arclength separation in [h, len/2]."""
    c = geometry_fields(curve)
    ell = c.length
    if not 0.0 < h <= ell / 2.0:
        raise InvalidWindow(f"h must lie in (0, {ell / 2.0:.6g}]")
    ds = ell / c.n
    kmin = int(np.ceil(h / ds))
    kmax = c.n // 2
    if kmin > kmax:
        kmin = kmax
    return float(_backend.window_min_dist(c.nodes, kmin, kmax))


def frechet_distance(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Discrete Frechet distance of the cyclic node sequences.

    Minimized over all cyclic start shifts with orientation preserved; an
    upper bound of the continuum value that converges under refinement.
    """
    return float(_backend.discrete_frechet_cyclic(c1.nodes, c2.nodes))


def hausdorff_distance(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Max of the two directed sup distances between the polyline images."""
    d12, _, _ = _backend.point_polyline_dist(c1.nodes, c2.nodes)
    d21, _, _ = _backend.point_polyline_dist(c2.nodes, c1.nodes)
    return float(max(d12.max(), d21.max()))


def l2_deviation(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Integral over c1's arclength of squared distance to the image of c2.

    Asymmetric by design; bounded by len(c1) * frechet_distance^2.
    """
    c = geometry_fields(c1)
    d, _, _ = _backend.point_polyline_dist(c.nodes, c2.nodes)
    return float((d**2).sum() * c.length / c.n)


# ---------------------------------------------------------------------------
# containment classification
# ---------------------------------------------------------------------------

def classify_relation(c1: ClosedCurve, c2: ClosedCurve) -> RelationClass:
    """Classify two positively oriented simple curves by containment.

    Boundaries crossing transversally at the polyline level are reported as
    overlapping; touching without crossing is classified by the winding of
    each curve's farthest-from-the-other sample point (robust even when the
    boundaries share points).
    """
    if _backend.any_proper_crossing(c1.nodes, c2.nodes):
        return RelationClass("overlapping")
    d1, _, _ = _backend.point_polyline_dist(c1.nodes, c2.nodes)
    if d1.max() == 0.0:
        return RelationClass("nested_1_in_2")  # identical images
    probe1 = c1.nodes[int(np.argmax(d1))]
    if winding_number(c2, probe1) == 1:
        return RelationClass("nested_1_in_2")
    d2, _, _ = _backend.point_polyline_dist(c2.nodes, c1.nodes)
    probe2 = c2.nodes[int(np.argmax(d2))]
    if winding_number(c1, probe2) == 1:
        return RelationClass("nested_2_in_1")
    return RelationClass("disjoint")


def sigma_set(family, lam: int, warn=None):
    """Indices lam' whose patch is controllable regardless of its distance to
    patch lam: same-sign nested pairs and opposite-sign disjoint pairs.

    Includes lam itself. Overlapping (crossing) pairs are excluded and
    reported through `warn`, a callable taking a message string.
    """
    out = set()
    ci = family.curves[lam]
    ti = family.strengths[lam]
    for j, (cj, tj) in enumerate(zip(family.curves, family.strengths)):
        if j == lam:
            out.add(j)
            continue
        rel = classify_relation(ci, cj)
        if rel.kind == "overlapping":
            if warn is not None:
                warn(f"patches {lam} and {j} have crossing boundaries; pair skipped")
            continue
        if ti * tj > 0 and rel.nested():
            out.add(j)
        elif ti * tj < 0 and rel.kind == "disjoint":
            out.add(j)
    return out


def touch_threshold(c1: ClosedCurve, c2: ClosedCurve) -> float:
    """Distance below which two discrete boundaries count as touching."""
    g1 = geometry_fields(c1)
    g2 = geometry_fields(c2)
    return 10.0 * max(g1.length / g1.n, g2.length / g2.n)
