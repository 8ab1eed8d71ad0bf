"""Switch between numba-compiled kernels and their pure-numpy fallbacks.

Set ``THREETANGLE_DISABLE_NUMBA=1`` before import to force the fallback path
(also used automatically when numba is not installed).
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("THREETANGLE_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(f=None, **options):
    """``numba.njit`` when acceleration is enabled, identity otherwise."""
    options.setdefault("cache", True)
    if not USE_NUMBA:
        return f if f is not None else (lambda g: g)
    if f is None:
        return lambda g: numba.njit(**options)(g)
    return numba.njit(**options)(f)


def max_threads():
    """Parallelism cap taken from ``THREETANGLE_THREADS`` (default 1)."""
    raw = os.environ.get("THREETANGLE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
