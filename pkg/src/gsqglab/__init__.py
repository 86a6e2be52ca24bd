"""Contour dynamics for generalized SQG patches, with verification tooling."""

from ._backend import backend_name
from .curves import (
    ClosedCurve,
    c1beta_seminorm,
    enclosed_area,
    geometry_fields,
    h2_seminorm,
    is_positively_oriented,
    resample_constant_speed,
    transport,
    winding_number,
)
from .metrics import (
    RelationClass,
    classify_relation,
    frechet_distance,
    hausdorff_distance,
    l2_deviation,
    pair_distance,
    self_distance,
    sigma_set,
)
from .velocity import (
    CutoffProfile,
    KernelSpec,
    PatchFamily,
    area_velocity,
    contour_velocity,
    default_cutoff,
    kernel_eval,
    tangential_derivative,
    velocity_on_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "ClosedCurve",
    "CutoffProfile",
    "KernelSpec",
    "PatchFamily",
    "RelationClass",
    "area_velocity",
    "backend_name",
    "c1beta_seminorm",
    "classify_relation",
    "contour_velocity",
    "default_cutoff",
    "enclosed_area",
    "frechet_distance",
    "geometry_fields",
    "h2_seminorm",
    "hausdorff_distance",
    "is_positively_oriented",
    "kernel_eval",
    "l2_deviation",
    "pair_distance",
    "resample_constant_speed",
    "self_distance",
    "sigma_set",
    "tangential_derivative",
    "transport",
    "velocity_on_boundary",
    "winding_number",
]
