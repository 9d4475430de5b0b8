"""Kernel backend selection.

``LAMPERTI_OU_BACKEND=numpy`` forces the vectorized numpy kernels;
the default is ``numba``, falling back to numpy when numba cannot be imported.
"""

import os
import warnings

from . import _kernels_numpy

BACKEND = os.environ.get("LAMPERTI_OU_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"LAMPERTI_OU_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

if BACKEND == "numba":
    try:
        from . import _kernels_numba as kernels
    except ImportError:  # pragma: no cover - depends on environment
        warnings.warn("numba unavailable; using the numpy kernels", RuntimeWarning, stacklevel=2)
        BACKEND = "numpy"
        kernels = _kernels_numpy
else:
    kernels = _kernels_numpy

numpy_kernels = _kernels_numpy


def get_kernels(name: str | None = None):
    """Kernel module for `name` (``"numba"``/``"numpy"``), or the active one."""
    if name is None:
        return kernels
    if name == "numpy":
        return _kernels_numpy
    from . import _kernels_numba

    return _kernels_numba
