"""Backend dispatch for the hot loops: compiled extension when available,
pure numpy otherwise.  STACKYAB_PURE=1 forces the fallback.

Both backends feed the same canonicalization, so echelon output is
byte-identical regardless of backend.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .modsolve import valuations

_impl = _kernels_py
_backend = "python"
if not os.environ.get("STACKYAB_PURE"):
    try:
        from . import _speedups

        _impl = _speedups
        _backend = "compiled"
    except ImportError:
        pass


def backend() -> str:
    """Name of the active backend ('compiled' or 'python')."""
    return _backend


def canonicalize(pivcols, rows, p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Inter-reduce a Howell basis to the unique canonical form of its span."""
    q = p ** k
    rows = np.asarray(rows, dtype=np.int64) % q
    pivcols = np.asarray(pivcols, dtype=np.int64)
    for idx in range(len(pivcols)):
        j = int(pivcols[idx])
        pv = p ** int(valuations(rows[idx, j], p, k))
        c = rows[:, j] // pv
        c[idx] = 0
        nz = np.nonzero(c)[0]
        if len(nz):
            rows[nz] = (rows[nz] - np.outer(c[nz], rows[idx])) % q
    return pivcols, rows


def echelon(mat, p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Canonical Howell form of the row span of mat over Z/p^k."""
    piv, rows = _impl.echelon_raw(mat, p, k)
    return canonicalize(piv, rows, p, k)


def cocycle_violation(table, vals, q: int) -> int:
    """First flat index g*n*n + h*n + k violating the 2-cocycle identity, or -1."""
    return int(_impl.cocycle_violation(table, vals, q))
