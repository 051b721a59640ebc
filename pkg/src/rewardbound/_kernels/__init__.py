"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure-Python
module is the reference implementation and the fallback. Selection happens
once at import, honoring REWARDBOUND_BACKEND=python|compiled, and can be
overridden per call site through ``get_backend``.
"""

from __future__ import annotations

import os
import warnings

from . import pykernels

try:
    from . import _ckernels

    HAVE_COMPILED = True
except ImportError:
    _ckernels = None
    HAVE_COMPILED = False

_FORCED = os.environ.get("REWARDBOUND_BACKEND", "").strip().lower()
if _FORCED == "python":
    DEFAULT_BACKEND = pykernels
elif _FORCED == "compiled":
    if not HAVE_COMPILED:
        raise ImportError(
            "REWARDBOUND_BACKEND=compiled but the extension is not built; "
            "reinstall the package or unset the variable"
        )
    DEFAULT_BACKEND = _ckernels
elif _FORCED:
    raise ImportError(f"unknown REWARDBOUND_BACKEND value: {_FORCED!r}")
else:
    if HAVE_COMPILED:
        DEFAULT_BACKEND = _ckernels
    else:
        warnings.warn(
            "compiled kernels unavailable, using the pure-Python fallback",
            RuntimeWarning,
            stacklevel=2,
        )
        DEFAULT_BACKEND = pykernels


def get_backend(name: str | None = None):
    """Resolve a backend by name: None for the default, else python|compiled."""
    if name is None:
        return DEFAULT_BACKEND
    key = name.strip().lower()
    if key == "python":
        return pykernels
    if key == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled backend requested but not built")
        return _ckernels
    raise ValueError(f"unknown backend name: {name!r}")


def active_backend_name() -> str:
    return DEFAULT_BACKEND.BACKEND_NAME
