"""Cartan matrices of the simple types and their lattice-quotient invariants.

The semisimple fundamental group (weight lattice modulo root lattice) is the
cokernel of the Cartan matrix; its invariant factors come from the exact
Smith normal form and carry the transformation certificate with them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteAbelian
from .snf import SNFResult, smith_normal_form

__all__ = [
    "CartanMatrix",
    "SimplyConnectedReport",
    "cartan_matrix",
    "cartan_types",
    "fundamental_group_ss",
    "simply_connected_check",
]

# valid rank windows per type; low ranks collapse onto earlier types
_RANK_RANGE = {
    "A": (1, None),
    "B": (2, None),
    "C": (3, None),
    "D": (4, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}


@dataclass
class CartanMatrix:
    """Integer Cartan matrix of a simple type in Bourbaki numbering."""

    type_label: str
    rank: int
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.int64)
        n = self.rank
        if a.shape != (n, n):
            raise ValueError("entries must be a rank x rank matrix")
        if (np.diag(a) != 2).any():
            raise ValueError("diagonal entries must equal 2")
        off = a[~np.eye(n, dtype=bool)]
        if (off > 0).any():
            raise ValueError("off-diagonal entries must be nonpositive")
        if ((a == 0) != (a.T == 0)).any():
            raise ValueError("zero pattern must be symmetric")
        self.entries = a

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"


def _validate_pair(type_label: str, rank: int) -> str:
    t = str(type_label).upper()
    if t not in _RANK_RANGE:
        raise ValueError(f"unknown type {type_label!r}")
    lo, hi = _RANK_RANGE[t]
    if rank < lo or (hi is not None and rank > hi):
        hi_txt = "" if hi is None else f" and at most {hi}"
        raise ValueError(f"type {t} needs rank at least {lo}{hi_txt}, got {rank}")
    return t


def cartan_matrix(type_label: str, rank: int) -> CartanMatrix:
    """Standard Bourbaki-numbered Cartan matrix; entry (i,j) is 2(ai,aj)/(aj,aj)."""
    t = _validate_pair(type_label, rank)
    n = rank
    a = 2 * np.eye(n, dtype=np.int64)

    def chain(pairs):
        for i, j in pairs:
            a[i, j] = a[j, i] = -1

    if t == "A":
        chain((i, i + 1) for i in range(n - 1))
    elif t == "B":
        # last simple root short: the (n-1, n) entry doubles
        chain((i, i + 1) for i in range(n - 2))
        a[n - 2, n - 1] = -2
        a[n - 1, n - 2] = -1
    elif t == "C":
        # last simple root long: transpose of type B
        chain((i, i + 1) for i in range(n - 2))
        a[n - 2, n - 1] = -1
        a[n - 1, n - 2] = -2
    elif t == "D":
        chain((i, i + 1) for i in range(n - 2))
        a[n - 3, n - 1] = a[n - 1, n - 3] = -1
    elif t == "E":
        # branch node 2 hangs off node 4 of the chain 1-3-4-5-...
        chain([(0, 2), (2, 3), (1, 3)] + [(i, i + 1) for i in range(3, n - 1)])
    elif t == "F":
        chain([(0, 1), (2, 3)])
        a[1, 2] = -2
        a[2, 1] = -1
    else:  # G
        a[0, 1] = -1
        a[1, 0] = -3
    return CartanMatrix(t, n, a)


def cartan_types(max_rank: int = 8):
    """All valid (type, rank) pairs up to the given rank, in table order."""
    out = []
    for t, (lo, hi) in _RANK_RANGE.items():
        top = max_rank if hi is None else min(hi, max_rank)
        out.extend((t, r) for r in range(lo, top + 1))
    return out


def fundamental_group_ss(type_label: str, rank: int) -> FiniteAbelian:
    """Weight lattice modulo root lattice: cokernel of the Cartan matrix."""
    cm = cartan_matrix(type_label, rank)
    res = smith_normal_form(cm.entries)
    if any(d == 0 for d in res.diagonal):
        raise ValueError("Cartan matrix is singular")  # impossible for valid pairs
    return FiniteAbelian(res.invariant_factors)


@dataclass
class SimplyConnectedReport:
    """Hom counts from the lattice quotient into each candidate kernel."""

    type_label: str
    rank: int
    fundamental: FiniteAbelian
    kernels: list[FiniteAbelian]
    hom_orders: list[int]
    simply_connected: bool
    all_trivial: bool


def simply_connected_check(type_label: str, rank: int,
                           kernels) -> SimplyConnectedReport:
    """Count homomorphisms from the fundamental group into candidate kernels.

    A trivial lattice quotient admits only zero maps, so a type with
    all-ones Smith diagonal cannot support a nontrivial central kernel.
    """
    pi1 = fundamental_group_ss(type_label, rank)
    ks = []
    orders = []
    for kern in kernels:
        a = kern if isinstance(kern, FiniteAbelian) else FiniteAbelian(kern)
        ks.append(a)
        o = 1
        for d in pi1.invariant_factors:
            for e in a.invariant_factors:
                o *= int(np.gcd(d, e))
        orders.append(o)
    simply = pi1.order == 1
    if simply and any(o != 1 for o in orders):
        raise AssertionError("trivial quotient admitted a nonzero homomorphism")
    return SimplyConnectedReport(
        str(type_label).upper(), rank, pi1, ks, orders, simply,
        all(o == 1 for o in orders),
    )
