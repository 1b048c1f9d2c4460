"""Edit-distance kernel with a compiled fast path.

The quadratic word-level Levenshtein loop dominates corpus evaluation, so it
is compiled (Cython) when the extension built; everything else in the package
is linear-time and stays in Python.  The pure-Python kernel is selected
automatically when the extension is unavailable, or forcibly via the
``TOKENWEAVE_PURE_PYTHON=1`` environment variable (used by the benchmark).
"""

from __future__ import annotations

import os
from array import array
from typing import Sequence

from . import _levenshtein_py

__all__ = ["edit_distance", "backend"]

_impl = _levenshtein_py.levenshtein_ints
_BACKEND = "python"

if os.environ.get("TOKENWEAVE_PURE_PYTHON") != "1":
    try:
        from . import _levenshtein as _ext

        _impl = _ext.levenshtein_ints
        _BACKEND = "cython"
    except ImportError:
        pass


def backend() -> str:
    """Name of the active kernel backend: "cython" or "python"."""
    return _BACKEND


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Word-level Levenshtein distance with unit costs.

    Tokens are interned to integer codes so the inner loop compares ints
    regardless of backend.
    """
    if not a:
        return len(b)
    if not b:
        return len(a)
    codes: dict[str, int] = {}
    ea = array("i", (codes.setdefault(w, len(codes)) for w in a))
    eb = array("i", (codes.setdefault(w, len(codes)) for w in b))
    return _impl(ea, eb)
