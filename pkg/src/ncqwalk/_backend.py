"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels`` is used. Setting ``NCQWALK_BACKEND=python``
forces the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from ncqwalk import _pykernels


def _load(name: str | None = None) -> tuple[str, ModuleType]:
    choice = (name or os.environ.get("NCQWALK_BACKEND", "auto")).lower()
    if choice not in ("auto", "cython", "python"):
        raise ValueError(f"unknown backend {choice!r}")
    if choice in ("auto", "cython"):
        try:
            from ncqwalk import _ckernels
        except ImportError:
            if choice == "cython":
                raise
        else:
            return "cython", _ckernels
    return "python", _pykernels


BACKEND, kernels = _load()


def available() -> dict[str, ModuleType]:
    """All importable kernel backends keyed by name."""
    found = {"python": _pykernels}
    try:
        from ncqwalk import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
