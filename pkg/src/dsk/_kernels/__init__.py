"""Numeric kernels with two interchangeable backends.

The numba backend JIT-compiles the hot loops (edit-distance DP fill, SMO
pair updates); the numpy backend is a pure-numpy fallback that produces
bit-identical results. Selection happens once at import time via the
``DSK_BACKEND`` environment variable: ``numba`` (default) or ``numpy``.
"""

import os

_requested = os.environ.get("DSK_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"DSK_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from dsk._kernels import _numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from dsk._kernels import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from dsk._kernels import _numpy as _impl

        BACKEND = "numpy"

levenshtein_matrix = _impl.levenshtein_matrix
smo_solve = _impl.smo_solve
