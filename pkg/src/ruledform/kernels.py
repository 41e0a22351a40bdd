"""Backend selection for the batch frame kernel.

The compiled extension is used when it was built; otherwise the NumPy
implementation. Set ``RULEDFORM_BACKEND=python`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py.frame_batch

if os.environ.get("RULEDFORM_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled.frame_batch
        BACKEND = "cython"


def frame_batch(delta, delta_s, delta_ss, theta, w, eps, eps_t, r):
    """Dispatch to the active backend after normalising dtypes and layout."""
    return _impl(
        np.ascontiguousarray(delta, dtype=np.complex128).reshape(-1, 3),
        np.ascontiguousarray(delta_s, dtype=np.complex128).reshape(-1, 3),
        np.ascontiguousarray(delta_ss, dtype=np.complex128).reshape(-1, 3),
        np.ascontiguousarray(theta, dtype=np.float64).reshape(-1),
        np.ascontiguousarray(w, dtype=np.complex128).reshape(-1),
        int(eps), int(eps_t), float(r),
    )


def python_frame_batch(*args):
    return _kernels_py.frame_batch(*args)
