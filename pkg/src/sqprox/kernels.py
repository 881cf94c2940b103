"""Backend selection for the prox kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``SQPROX_PURE_PYTHON`` is set to a non-empty value,
the pure-Python reference implementation is used.
"""

import os

from . import _pykernels

EUCLID = _pykernels.EUCLID
HYPER = _pykernels.HYPER
PROFILES = {"quadratic": 0, "dist": 1, "sqrtnorm": 2, "maxcombo": 3, "negquad": 4}

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("SQPROX_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

composite_grid = _impl.composite_grid
golden_segment = _impl.golden_segment


def backends():
    """Available kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
