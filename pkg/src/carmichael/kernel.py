"""Backend selection for the residue kernels.

The compiled extension is used when it imports; set ``CARMICHAEL_PURE=1``
to force the numpy fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _kernel_py


def _load() -> ModuleType:
    if os.environ.get("CARMICHAEL_PURE", "") not in ("", "0"):
        return _kernel_py
    try:
        from . import _kernel
    except ImportError:
        return _kernel_py
    return _kernel


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        return _active
    if name == "numpy":
        return _kernel_py
    if name == "cython":
        from . import _kernel

        return _kernel
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        from . import _kernel  # noqa: F401
    except ImportError:
        return names
    return ["cython"] + names


_active = _load()
BACKEND = _active.BACKEND
