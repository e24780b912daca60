"""Hot numeric kernels with a numba route and a pure-numpy route.

The numba route is used when numba imports cleanly, unless the environment
variable ``MWMUSIC_BACKEND`` is set to ``numpy``. Both routes expose the same
four functions: ``bessel_j_table``, ``bessel_y01``, ``hankel1_0`` and
``residual_sums``.
"""

import os

from . import _numpy

_requested = os.environ.get("MWMUSIC_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"MWMUSIC_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

BACKEND = "numpy"
if _requested == "numba":
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba missing
        _impl = _numpy
else:
    _impl = _numpy

bessel_j_table = _impl.bessel_j_table
bessel_y01 = _impl.bessel_y01
hankel1_0 = _impl.hankel1_0
residual_sums = _impl.residual_sums


def get_backend(name):
    """Return the kernel module for ``name`` ('numba' or 'numpy')."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba

        return _numba
    raise ValueError(f"unknown backend {name!r}")
