"""Pick the simulation kernels: compiled if importable, else pure Python.

Set ``LOGITMETA_PURE=1`` to force the pure-Python kernels.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def compiled_available() -> bool:
    return _ckernels is not None


def get_kernels(name: str | None = None) -> ModuleType:
    """Return the kernel module ``"compiled"``, ``"python"`` or the default."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    if name is not None:
        raise ValueError(f"unknown backend {name!r}")
    return kernels


def _default() -> ModuleType:
    if os.environ.get("LOGITMETA_PURE", "") not in ("", "0") or _ckernels is None:
        return _pykernels
    return _ckernels


kernels = _default()
BACKEND = "compiled" if kernels is _ckernels else "python"
