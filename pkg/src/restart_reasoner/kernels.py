"""Backend selection for the hot loops.

The compiled extension is used when it was built and importable; setting
``RESTART_REASONER_PURE=1`` forces the pure-Python fallback. Both backends
return identical results.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


compiled: ModuleType | None = _load_compiled()
python: ModuleType = _pykernels

if compiled is not None and os.environ.get("RESTART_REASONER_PURE", "") not in ("1", "true", "yes"):
    active: ModuleType = compiled
    BACKEND = "cython"
else:
    active = _pykernels
    BACKEND = "python"


def backend(name: str | None = None) -> ModuleType:
    """Kernel module by name: ``"cython"``, ``"python"`` or None for the active one."""
    if name is None:
        return active
    if name == "python":
        return _pykernels
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
