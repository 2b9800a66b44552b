"""Backend switch for the compiled kernels.

Set ``HETNET_FFR_NUMBA=0`` before import to run every hot loop through the
plain numpy code path instead of numba. Both paths execute the same source
(or, for the Monte Carlo reduction, a vectorised twin) so results agree to
rounding.
"""

import os

try:
    import numba
    from numba.extending import register_jitable as _register_jitable
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    _register_jitable = None

ENV_FLAG = "HETNET_FFR_NUMBA"


def _flag_enabled(value):
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = numba is not None and _flag_enabled(os.environ.get(ENV_FLAG, "1"))
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func=None, *, cache=True):
    """``numba.njit(nogil=True)`` when the numba backend is active, else a no-op."""

    def wrap(f):
        if USE_NUMBA:
            return numba.njit(nogil=True, cache=cache)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def jitable(func):
    """Helper callable from both jitted and plain Python code."""
    if USE_NUMBA:
        return _register_jitable(func)
    return func
