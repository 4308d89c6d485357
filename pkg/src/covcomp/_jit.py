"""Backend selection for the compiled kernels.

Set ``COVCOMP_DISABLE_NUMBA=1`` to force the pure-numpy path even when numba
is importable. The choice is made once, at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("COVCOMP_DISABLE_NUMBA", "").strip().lower() in _FALSY


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, otherwise identity."""
    if numba is None:  # pragma: no cover
        return func
    return numba.njit(cache=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
