"""JIT switch for the hot loops.

Kernels are written once as plain Python over numpy arrays.  When numba is
importable and ``PHASEGEOM_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``numba.njit``; otherwise the same source runs interpreted.
"""

import os

_DISABLED = os.environ.get("PHASEGEOM_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by PHASEGEOM_DISABLE_NUMBA")
    import numba as _numba

    HAS_NUMBA = True
except ImportError:
    _numba = None
    HAS_NUMBA = False


def jit(func):
    """Compile ``func`` in nopython mode if numba is active, else return it."""
    if HAS_NUMBA:
        return _numba.njit(cache=True)(func)
    return func
