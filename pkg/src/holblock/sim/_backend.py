"""Pick the slot-loop implementation at import time.

The compiled kernel is used when it has been built; ``HOLBLOCK_BACKEND=python``
forces the pure-Python fallback.
"""

import importlib
import os

from . import _kernel_py

BACKENDS = ("cython", "python")


def load(name: str):
    if name == "python":
        return _kernel_py
    if name == "cython":
        return importlib.import_module("holblock.sim._kernel")
    raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")


def available() -> list[str]:
    names = []
    for name in BACKENDS:
        try:
            load(name)
        except ImportError:
            continue
        names.append(name)
    return names


def _select():
    forced = os.environ.get("HOLBLOCK_BACKEND", "").strip().lower()
    if forced:
        return forced, load(forced)
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", _kernel_py


BACKEND, kernel = _select()
