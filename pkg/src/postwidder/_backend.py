"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels``.  Set ``POSTWIDDER_BACKEND=python`` to force the
fallback, ``=cython`` to require the extension.
"""

from __future__ import annotations

import os

from postwidder import _pykernels

try:
    from postwidder import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _default():
    want = os.environ.get("POSTWIDDER_BACKEND", "auto").lower()
    if want == "python":
        return "python"
    if want == "cython":
        if _ckernels is None:
            raise ImportError("POSTWIDDER_BACKEND=cython but postwidder._ckernels is not built")
        return "cython"
    return "cython" if _ckernels is not None else "python"


DEFAULT = _default()


def get(name: str | None = None, native_ok: bool = True):
    """(backend name, module).  Non-native functions always use Python."""
    name = name or DEFAULT
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})")
    if name == "cython" and not native_ok:
        name = "python"
    return name, BACKENDS[name]


def available() -> list[str]:
    return sorted(BACKENDS)
