"""Backend selection for the hot numeric kernels.

Numba is used when importable; set ``SKPLANE_DISABLE_NUMBA=1`` to force the
pure-NumPy fallback (useful for debugging and for the benchmark baseline).
"""

import os

_disabled = os.environ.get("SKPLANE_DISABLE_NUMBA", "").strip() not in ("", "0")

if _disabled:
    HAVE_NUMBA = False
else:
    try:
        from numba import njit  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

if not HAVE_NUMBA:
    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap

BACKEND = "numba" if HAVE_NUMBA else "numpy"
