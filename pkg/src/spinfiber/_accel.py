"""Numba dispatch switch.

Set ``SPINFIBER_NUMBA=0`` to force the pure-numpy kernels. When numba is not
importable the numpy path is used regardless of the flag.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("SPINFIBER_NUMBA", "1").strip().lower() not in (
    "0", "false", "no", "off")


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when numba exists, identity otherwise."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if not HAVE_NUMBA:
            return f
        return numba.njit(**kwargs)(f)

    if func is None:
        return wrap
    return wrap(func)
