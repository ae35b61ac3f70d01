"""Kernel backend selection.

The package ships two interchangeable kernel sets: a compiled Cython
extension and a pure-NumPy fallback. They are byte-identical by contract;
the compiled one is simply faster. Selection happens once at import:

* ``DETAUG_BACKEND=compiled`` requires the extension and fails loudly if it
  did not build.
* ``DETAUG_BACKEND=python`` forces the fallback.
* unset or ``auto``: compiled when available, fallback otherwise.

:func:`set_backend` switches at runtime, mainly for benchmarks and parity
tests.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:  # extension not built on this interpreter
    _kernels_c = None

_BY_NAME = {"python": _kernels_py}
if _kernels_c is not None:
    _BY_NAME["compiled"] = _kernels_c


def available_backends() -> tuple[str, ...]:
    """Backend names usable in this process, fastest first."""
    if "compiled" in _BY_NAME:
        return ("compiled", "python")
    return ("python",)


def _resolve(name: str):
    if name == "auto":
        return _BY_NAME.get("compiled", _kernels_py)
    try:
        return _BY_NAME[name]
    except KeyError:
        if name == "compiled":
            raise RuntimeError(
                "compiled kernel backend requested but the extension is not built"
            ) from None
        raise ValueError(
            f"unknown backend {name!r}; expected one of: auto, compiled, python"
        ) from None


_active = _resolve(os.environ.get("DETAUG_BACKEND", "auto"))


def kernels():
    """The active kernel module."""
    return _active


def get_backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return _active.BACKEND_NAME


def set_backend(name: str) -> str:
    """Select a backend by name ('auto', 'compiled', 'python'); returns the result."""
    global _active
    _active = _resolve(name)
    return _active.BACKEND_NAME
