"""Backend switch for the compiled kernels.

Set ``CLIMRISK_NO_NUMBA=1`` before import to force the pure-numpy code paths
(useful for debugging and for platforms without numba).
"""
import os

DISABLED = os.environ.get("CLIMRISK_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    _njit = None

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` with numba, or return it unchanged."""
    if _njit is None:
        return func
    return _njit(cache=True, nogil=True)(func)
