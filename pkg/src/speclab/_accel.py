"""Backend selection for the numeric kernels.

Set ``SPECLAB_NO_NUMBA=1`` to force the pure-numpy path.  When numba is not
importable the numpy path is used regardless of the flag.
"""

import os

_FLAG = "SPECLAB_NO_NUMBA"

DISABLED_BY_ENV = os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV


def jit(func):
    """Compile ``func`` with numba when available, else return ``None``."""
    if not HAVE_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(func)
