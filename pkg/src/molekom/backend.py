"""Kernel backend selection and thread budget.

The Monte Carlo inner loops exist twice: numba-jitted per-trial loops and a
vectorized pure-numpy fallback. MOLEKOM_BACKEND picks one ("numba", "numpy",
or "auto", the default). Both backends are deterministic and thread-count
invariant for a given seed, but they consume the random stream differently,
so their outputs agree statistically rather than bit-for-bit.
"""

from __future__ import annotations

import os

ENV_BACKEND = "MOLEKOM_BACKEND"
ENV_THREADS = "MOLEKOM_THREADS"

_BACKENDS = ("auto", "numba", "numpy")


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def active_backend(override: str | None = None) -> str:
    """Resolve the backend name, honoring the override then the env flag."""
    choice = (override or os.environ.get(ENV_BACKEND, "auto")).strip().lower()
    if choice not in _BACKENDS:
        raise ValueError(f"{ENV_BACKEND} must be one of {_BACKENDS}, got {choice!r}")
    if choice == "auto":
        return "numba" if numba_available() else "numpy"
    if choice == "numba" and not numba_available():
        raise RuntimeError("MOLEKOM_BACKEND=numba but numba is not importable")
    return choice


def get_kernels(backend: str | None = None):
    """Kernel module for the resolved backend; both expose the same functions."""
    if active_backend(backend) == "numba":
        from . import _kernels_numba as kernels
    else:
        from . import _kernels_numpy as kernels
    return kernels


def thread_count() -> int:
    """Worker threads for chunked Monte Carlo runs.

    MOLEKOM_THREADS sets the count explicitly; the default is min(4, cpus).
    The chunk layout never depends on this value, so results do not either.
    """
    env = os.environ.get(ENV_THREADS)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{ENV_THREADS} must be >= 1, got {n}")
        return n
    return min(4, os.cpu_count() or 1)
