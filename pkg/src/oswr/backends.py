"""Backend selection: numba-jitted kernels with a pure-numpy fallback.

The active backend is resolved, in order, from :func:`select`, the
``OSWR_BACKEND`` environment variable (``"numba"`` or ``"numpy"``), and
finally numba availability.  ``benchmarks/backend_bench.py`` compares the
two paths on identical solves.
"""

from __future__ import annotations

import os

from .errors import ValidationError
from . import kernels_np

try:
    from . import kernels_nb
    HAS_NUMBA = True
except ImportError:
    kernels_nb = None
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy")
_forced: str | None = None


def select(name: str | None) -> None:
    """Force a backend for this process (None restores env/default resolution)."""
    global _forced
    if name is not None:
        if name not in BACKENDS:
            raise ValidationError(f"unknown backend {name!r}; expected one of {BACKENDS}")
        if name == "numba" and not HAS_NUMBA:
            raise ValidationError("numba backend requested but numba is not importable")
    _forced = name


def active() -> str:
    if _forced is not None:
        return _forced
    env = os.environ.get("OSWR_BACKEND")
    if env:
        if env not in BACKENDS:
            raise ValidationError(f"OSWR_BACKEND={env!r} invalid; expected one of {BACKENDS}")
        if env == "numba" and not HAS_NUMBA:
            raise ValidationError("OSWR_BACKEND=numba but numba is not importable")
        return env
    return "numba" if HAS_NUMBA else "numpy"


def kernels():
    """Module providing solve_explicit / solve_implicit / thomas."""
    return kernels_nb if active() == "numba" else kernels_np


def thread_count() -> int:
    """Worker-pool size: OSWR_THREADS or the hardware parallelism."""
    env = os.environ.get("OSWR_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValidationError(f"OSWR_THREADS={env!r} is not an integer") from exc
        if n < 1:
            raise ValidationError(f"OSWR_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1
