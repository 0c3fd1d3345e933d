"""Kernel dispatch: numba when available and not disabled, numpy otherwise."""
from . import _kernels_numpy
from ._accel import USE_NUMBA

if USE_NUMBA:
    from . import _kernels_numba as _impl

    BACKEND = "numba"
else:
    _impl = _kernels_numpy
    BACKEND = "numpy"

ols_batch = _impl.ols_batch
transform = _impl.transform
weighted_scores = _impl.weighted_scores
round_outcomes = _impl.round_outcomes


def get_backend(name):
    """Kernel module by name, for cross-checks and benchmarks."""
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    raise ValueError(f"unknown backend {name!r}")
