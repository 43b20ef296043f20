"""Kernel backend selection: numba JIT with a pure-numpy fallback.

Set ``BHDIMER_DISABLE_NUMBA=1`` to force the numpy path (useful when
numba is unavailable or for debugging).  Both backends consume the same
pre-generated random streams, so results are reproducible either way.
"""

from __future__ import annotations

import os

_FLAG = "BHDIMER_DISABLE_NUMBA"


def numba_enabled() -> bool:
    if os.environ.get(_FLAG, "0") not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


_ENABLED = numba_enabled()


def active_backend() -> str:
    return "numba" if _ENABLED else "numpy"


if _ENABLED:
    import numba

    def maybe_jit(func):
        return numba.njit(cache=True)(func)
else:
    def maybe_jit(func):
        return func
