"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback is used. Set ``XXZLADDER_PURE_PYTHON=1`` to force the fallback.
"""
import os
from types import ModuleType

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_forced = os.environ.get("XXZLADDER_PURE_PYTHON", "").strip() not in ("", "0")

kernels: ModuleType = _fallback if (_forced or _compiled is None) else _compiled
COMPILED = kernels is _compiled


def get_backend(name: str) -> ModuleType:
    """Return a specific backend: ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _fallback
    if name == "compiled":
        if _compiled is None:
            raise ImportError("xxzladder._kernels is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])
