"""Optional numba acceleration.

Every kernel in :mod:`noncommutator._kernels` is written in the subset of
Python that numba's nopython mode accepts, so the same source runs either
compiled or interpreted.  Set ``NONCOMMUTATOR_PURE_PYTHON=1`` before the
first import to force the interpreted (numpy-only) path.
"""

import os

PURE_PYTHON = os.environ.get("NONCOMMUTATOR_PURE_PYTHON", "").strip() not in ("", "0")

if not PURE_PYTHON:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        PURE_PYTHON = True

BACKEND = "python" if PURE_PYTHON else "numba"


def njit(func):
    if PURE_PYTHON:
        return func
    return numba.njit(cache=True, nogil=True)(func)
