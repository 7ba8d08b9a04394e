"""Selects between numba-compiled kernels and the pure-numpy fallback.

Set ``HILBERT_DYN_DISABLE_NUMBA=1`` to force the numpy path (also used when
numba is not importable).
"""

import os

_FLAG = os.environ.get("HILBERT_DYN_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True)`` when numba is present, identity otherwise."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True)(func)
