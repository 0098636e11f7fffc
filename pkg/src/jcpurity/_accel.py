"""Backend selection for the hot kernels.

Kernels are compiled with numba when it is importable, unless the environment
variable ``JCPURITY_DISABLE_NUMBA`` is set to a truthy value. The pure-numpy
implementations are always importable and serve as the fallback.
"""
import logging
import os

__all__ = ["USE_NUMBA", "NUMBA_AVAILABLE", "njit"]

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and (
    os.environ.get("JCPURITY_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY
)


def njit(func):
    """Compile ``func`` with ``numba.njit`` if numba is present, else return None."""
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(cache=True, nogil=True)(func)
