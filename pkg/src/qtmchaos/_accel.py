"""Numba switch for the hot kernels.

Set ``QTMCHAOS_DISABLE_NUMBA=1`` to force the pure-numpy path (useful when
numba is missing or for debugging). The flag is read once at import.
"""

import os

_FLAG = os.environ.get("QTMCHAOS_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True)(func)


def default_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
