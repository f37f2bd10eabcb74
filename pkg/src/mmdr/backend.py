"""Kernel backend selection.

The convolution kernels exist twice: numba-jitted loops
(:mod:`mmdr._kernels_numba`) and vectorized numpy
(:mod:`mmdr._kernels_numpy`). The active path is chosen once at import
from the ``MMDR_BACKEND`` environment variable:

* ``auto`` (default) -- numba if it imports, numpy otherwise
* ``numba``          -- force numba, fail loudly if missing
* ``numpy``          -- force the pure numpy path

Both paths implement identical contracts and agree to float64 roundoff;
``mmdr bench`` compares their throughput.
"""

import os

from . import _kernels_numpy

_requested = os.environ.get("MMDR_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"MMDR_BACKEND must be auto|numba|numpy, got {_requested!r}")

if _requested == "numpy":
    _impl = _kernels_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        _impl = _kernels_numpy
        BACKEND = "numpy"

conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
tconv2d_forward = _impl.tconv2d_forward
tconv2d_backward = _impl.tconv2d_backward


def implementations():
    """Return {name: module} of all importable kernel implementations."""
    impls = {"numpy": _kernels_numpy}
    try:
        from . import _kernels_numba

        impls["numba"] = _kernels_numba
    except ImportError:
        pass
    return impls
