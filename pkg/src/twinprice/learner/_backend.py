"""Kernel selection: compiled extension if importable, numpy otherwise.

Set ``TWINPRICE_BACKEND=python`` to force the numpy kernels.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernel


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("TWINPRICE_BACKEND", "").lower() in ("python", "numpy", "py"):
        return _pykernel, "python"
    try:
        from . import _ckernel
    except ImportError:
        return _pykernel, "python"
    return _ckernel, "cython"


kernel, BACKEND = _load()


def get_kernel(name: str | None = None) -> ModuleType:
    """Return a specific kernel module (``"python"`` or ``"cython"``)."""
    if name is None:
        return kernel
    if name == "python":
        return _pykernel
    if name == "cython":
        from . import _ckernel
        return _ckernel
    raise ValueError(f"unknown backend {name!r}")
