"""Numba/pure-numpy backend selection.

Hot kernels are written once and compiled with numba when it is available.
Setting the environment variable SIGMA_ATLAS_NO_NUMBA=1 (before import)
forces the pure-Python/numpy path; the same happens automatically when numba
is not installed.  Kernels avoid fastmath so both paths produce bit-identical
IEEE-754 results.
"""

import os

USE_NUMBA = os.environ.get("SIGMA_ATLAS_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:
        USE_NUMBA = False

# nogil lets a thread pool run row chunks concurrently; cache persists the
# compiled kernels across processes.
JIT_OPTIONS = dict(cache=True, nogil=True)


def maybe_jit(func):
    """Compile func with numba, or return it unchanged on the fallback path."""
    if USE_NUMBA:
        return _njit(**JIT_OPTIONS)(func)
    return func


def python_version(func):
    """The uncompiled version of a (possibly jitted) kernel."""
    return getattr(func, "py_func", func)
