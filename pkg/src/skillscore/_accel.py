"""Numba availability switch.

Set ``SKILLSCORE_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""
import os

_DISABLED = os.environ.get("SKILLSCORE_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, else an identity decorator.

    The numba kernels module is always importable this way, which lets the
    tests run the loop-style kernels as plain Python when numba is missing.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
