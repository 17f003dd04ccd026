"""Kernel backend selection: compiled extension with a pure NumPy fallback.

The choice happens once at import.  Set ``TCXY_BACKEND=python`` to force the
fallback or ``TCXY_BACKEND=compiled`` to make a missing extension fatal; the
default ``auto`` prefers the extension and falls back silently.
"""

from __future__ import annotations

import os

from . import kernels_py
from .errors import ConfigError

_requested = os.environ.get("TCXY_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise ConfigError(
        f"TCXY_BACKEND must be auto, compiled, or python, got {_requested!r}")

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _kernels as _impl
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = kernels_py

BACKEND_NAME = "python" if _impl is kernels_py else "compiled"

evolve_blocks = _impl.evolve_blocks
rdm_series = _impl.rdm_series


def get_backend(name: str):
    """Return a specific kernel module by name, for benchmarks and tests."""
    if name == "python":
        return kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ConfigError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    """Names of the kernel implementations importable in this environment."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)
