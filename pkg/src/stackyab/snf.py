"""Exact integer Smith normal form with unimodular transform certificates.

All arithmetic is over Python ints, so there is no overflow at any size;
matrices here stay small (presentations of finite abelian groups, Cartan
matrices), and extended-gcd clearing keeps the entries tame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MAX_SNF_DIM, CapExceeded


def _as_pyint_matrix(mat) -> list[list[int]]:
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    if arr.size and arr.dtype != object and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise ValueError("matrix entries must be integers")
    if not arr.size:
        return [[] for _ in range(arr.shape[0])]
    out = []
    for row in arr.tolist():
        out.append([int(x) for x in row])
    return out


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _bezout(p: int, q: int, g: int) -> tuple[int, int]:
    # x, y with x*p + y*q == g == gcd(p, q); iterative extended Euclid
    x0, x1 = 1, 0
    y0, y1 = 0, 1
    a, b = p, q
    while b:
        k, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a == g:
        return x0, y0
    return -x0, -y0  # gcd came out negative of g (p, q signs)


@dataclass
class SNFResult:
    """D = left @ input @ right with unimodular left/right and d1 | d2 | ... ."""

    diagonal: list[int]
    left: np.ndarray
    right: np.ndarray
    matrix: np.ndarray

    def verify(self) -> bool:
        m, n = self.matrix.shape
        left = [[int(x) for x in row] for row in self.left.tolist()]
        right = [[int(x) for x in row] for row in self.right.tolist()]
        a = [[int(x) for x in row] for row in self.matrix.tolist()]
        prod = _matmul(_matmul(left, a), right)
        for i in range(m):
            for j in range(n):
                want = self.diagonal[i] if (i == j and i < len(self.diagonal)) else 0
                if prod[i][j] != want:
                    return False
        if abs(_det(left)) != 1 or abs(_det(right)) != 1:
            return False
        for i in range(len(self.diagonal) - 1):
            d0, d1 = self.diagonal[i], self.diagonal[i + 1]
            if d0 and d1 % d0 != 0:
                return False
            if d0 == 0 and d1 != 0:
                return False
        return True

    @property
    def invariant_factors(self) -> list[int]:
        """Diagonal entries > 1 (the nontrivial cyclic factors of the cokernel)."""
        return [d for d in self.diagonal if d > 1]


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(cols):
                    oi[j] += aik * bk[j]
    return out


def _det(a: list[list[int]]) -> int:
    # Bareiss fraction-free elimination; exact for integer matrices.
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(mat, with_transforms: bool = True) -> SNFResult:
    """Smith normal form of an integer matrix, with certifying transforms.

    Returns SNFResult where left @ mat @ right is diagonal with the
    divisibility chain d1 | d2 | ... (zeros last).  Clearing uses extended-gcd
    2x2 unimodular blocks, which keeps entry growth tolerable at the
    dimensions this package works at.
    """
    a = _as_pyint_matrix(mat)
    m = len(a)
    n = len(a[0]) if m else 0
    if max(m, n) > MAX_SNF_DIM:
        raise CapExceeded(f"matrix dimension {max(m, n)} exceeds cap {MAX_SNF_DIM}")
    left = _identity(m)
    right = _identity(n)

    def row_gcd_clear(t, i, j):
        # combine rows t and i so that a[i][j] = 0; pivot a[t][j] becomes the gcd
        p, q = a[t][j], a[i][j]
        if q == 0:
            return
        if p == 0:
            a[t], a[i] = a[i], a[t]
            left[t], left[i] = left[i], left[t]
            return
        if q % p == 0:
            # exact clear leaves the pivot row untouched (no recontamination)
            c0 = q // p
            ri, rt = a[i], a[t]
            for c in range(n):
                ri[c] -= c0 * rt[c]
            li, lt = left[i], left[t]
            for c in range(m):
                li[c] -= c0 * lt[c]
            return
        g = math.gcd(p, q)
        x, y = _bezout(p, q, g)
        u, v = -(q // g), p // g
        rt, ri = a[t], a[i]
        for c in range(n):
            rt[c], ri[c] = x * rt[c] + y * ri[c], u * rt[c] + v * ri[c]
        lt, li = left[t], left[i]
        for c in range(m):
            lt[c], li[c] = x * lt[c] + y * li[c], u * lt[c] + v * li[c]

    def col_gcd_clear(t, i, j):
        # combine columns t and i so that a[j][i] = 0; pivot a[j][t] becomes the gcd
        p, q = a[j][t], a[j][i]
        if q == 0:
            return
        if p == 0:
            for r in range(m):
                a[r][t], a[r][i] = a[r][i], a[r][t]
            for r in range(n):
                right[r][t], right[r][i] = right[r][i], right[r][t]
            return
        if q % p == 0:
            c0 = q // p
            for r in range(m):
                a[r][i] -= c0 * a[r][t]
            for r in range(n):
                right[r][i] -= c0 * right[r][t]
            return
        g = math.gcd(p, q)
        x, y = _bezout(p, q, g)
        u, v = -(q // g), p // g
        for r in range(m):
            art, ari = a[r][t], a[r][i]
            a[r][t], a[r][i] = x * art + y * ari, u * art + v * ari
        for r in range(n):
            rrt, rri = right[r][t], right[r][i]
            right[r][t], right[r][i] = x * rrt + y * rri, u * rrt + v * rri

    def row_swap(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            left[i], left[j] = left[j], left[i]

    def col_swap(i, j):
        if i != j:
            for t in range(m):
                a[t][i], a[t][j] = a[t][j], a[t][i]
            for t in range(n):
                right[t][i], right[t][j] = right[t][j], right[t][i]

    def row_negate(i):
        for t in range(n):
            a[i][t] = -a[i][t]
        for t in range(m):
            left[i][t] = -left[i][t]

    r = min(m, n)
    t = 0
    while t < r:
        # find a minimal-magnitude nonzero entry to pivot on
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, piv = v, (i, j)
                    if v == 1:
                        break
            if best == 1:
                break
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])
        # alternate clearing column t then row t; each round divides the pivot
        while True:
            for i in range(t + 1, m):
                row_gcd_clear(t, i, t)
            for j in range(t + 1, n):
                col_gcd_clear(t, j, t)
            if not any(a[i][t] for i in range(t + 1, m)):
                if not any(a[t][j] for j in range(t + 1, n)):
                    break
        if a[t][t] < 0:
            row_negate(t)
        # pivot must divide the trailing block; fold an offending row in and redo
        offender = None
        d = a[t][t]
        for i in range(t + 1, m):
            if any(v % d for v in a[i][t + 1:n]):
                offender = i
                break
        if offender is not None:
            ao, at = a[offender], a[t]
            for c in range(n):
                at[c] += ao[c]
            lo, lt = left[offender], left[t]
            for c in range(m):
                lt[c] += lo[c]
            continue  # redo this pivot slot
        t += 1

    diagonal = [a[i][i] for i in range(min(m, n))]

    def _obj(rows_list, nrows, ncols):
        out = np.empty((nrows, ncols), dtype=object)
        for i in range(nrows):
            for j in range(ncols):
                out[i, j] = rows_list[i][j]
        return out

    src = _as_pyint_matrix(mat)
    return SNFResult(
        diagonal=diagonal,
        left=_obj(left, m, m),
        right=_obj(right, n, n),
        matrix=_obj(src, m, n),
    )


def invariant_factors_of_diagonal(diag: list[int]) -> list[int]:
    """Normalize an arbitrary list of cyclic orders into an invariant-factor chain."""
    diag = [abs(int(d)) for d in diag]
    if any(d == 0 for d in diag):
        raise ValueError("orders must be nonzero")
    k = len(diag)
    if k == 0:
        return []
    mat = [[0] * k for _ in range(k)]
    for i, d in enumerate(diag):
        mat[i][i] = d
    res = smith_normal_form(mat)
    return res.invariant_factors


def cokernel_structure(mat) -> tuple[list[int], SNFResult]:
    """Invariant factors (>1) of Z^rows / (mat @ Z^cols), with the SNF certificate."""
    res = smith_normal_form(mat)
    rows = np.asarray(mat).shape[0]
    rank = sum(1 for d in res.diagonal if d != 0)
    if rank < rows:
        raise ValueError("cokernel has free part; expected a finite quotient")
    return res.invariant_factors, res
