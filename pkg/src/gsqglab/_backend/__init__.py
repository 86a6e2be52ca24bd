"""Hot-kernel backend selection.

The compiled extension (`_core`, Cython) is preferred when importable; the
NumPy implementation is the fallback. Override with GSQGLAB_BACKEND=numpy
or GSQGLAB_BACKEND=compiled (the latter raises if the extension is missing).
"""

import os

from . import _numpy

_KERNEL_NAMES = [
    "velocity_sum",
    "dvelocity_sum",
    "point_polyline_dist",
    "polyline_min_dist",
    "window_min_dist",
    "tangent_pair_sup",
    "winding_inside",
    "any_proper_crossing",
    "self_intersects",
    "discrete_frechet_cyclic",
    "maximal_op",
]

_choice = os.environ.get("GSQGLAB_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "numpy"):
    raise ValueError(f"GSQGLAB_BACKEND must be auto|compiled|numpy, got {_choice!r}")

_impl = _numpy
BACKEND = "numpy"
if _choice in ("auto", "compiled"):
    try:
        from . import _core

        _impl = _core
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise

for _name in _KERNEL_NAMES:
    globals()[_name] = getattr(_impl, _name, getattr(_numpy, _name))

# pure-NumPy utilities shared by both backends
chi_default = _numpy.chi_default
chi_default_deriv = _numpy.chi_default_deriv
frechet_cyclic_coupling = _numpy.frechet_cyclic_coupling
CHI_FLOOR = _numpy.CHI_FLOOR


def backend_name():
    return BACKEND


def get_impl(name):
    """Fetch one kernel from a named backend ('numpy' or 'compiled')."""
    if name == "numpy":
        return _numpy
    from . import _core

    return _core
