"""JIT switch for the numeric kernels.

Kernels are written once, in the subset of Python that numba compiles. They
are compiled with ``numba.njit`` unless numba is missing or the environment
variable ``PYTH2COLOR_NO_JIT`` is set to a non-empty value other than ``0``,
in which case the very same functions run under the interpreter on numpy
arrays.
"""

from __future__ import annotations

import os

_flag = os.environ.get("PYTH2COLOR_NO_JIT", "")
JIT_DISABLED = _flag not in ("", "0")

try:
    if JIT_DISABLED:
        raise ImportError("JIT disabled by PYTH2COLOR_NO_JIT")
    import numba as _numba
except ImportError:
    _numba = None

HAS_JIT = _numba is not None


def kernel(fn=None, *, nogil=False):
    """Compile ``fn`` with ``njit(cache=True)`` when available, else return it unchanged.

    The returned object always exposes ``py_func``, the uncompiled function,
    so tests and benchmarks can drive both paths in one process.
    """

    def wrap(f):
        if _numba is None:
            f.py_func = f
            return f
        return _numba.njit(cache=True, nogil=nogil)(f)

    if fn is None:
        return wrap
    return wrap(fn)
