# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the elimination and verification hot loops."""

import numpy as np


cdef long _modinv(long u, long q):
    # extended Euclid; u is a unit mod q
    cdef long a = u % q, b = q
    cdef long x0 = 1, x1 = 0, t, k
    while b:
        k = a / b
        t = a - k * b
        a = b
        b = t
        t = x0 - k * x1
        x0 = x1
        x1 = t
    x0 %= q
    if x0 < 0:
        x0 += q
    return x0


def echelon_raw(mat, long p, long k):
    """Howell row basis of the span of mat's rows over Z/p^k, streaming."""
    cdef long q = p ** k
    mat_np = np.ascontiguousarray(np.asarray(mat, dtype=np.int64) % q)
    if mat_np.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    cdef long nr = mat_np.shape[0]
    cdef long w = mat_np.shape[1]
    basis_np = np.zeros((w, w), dtype=np.int64)
    pivval_np = np.full(w, k + 1, dtype=np.int64)
    powtab_np = p ** np.arange(k + 1, dtype=np.int64)
    buf_np = np.zeros(w, dtype=np.int64)
    cdef long[:, ::1] a = mat_np
    cdef long[:, ::1] basis = basis_np
    cdef long[::1] pivval = pivval_np
    cdef long[::1] powtab = powtab_np
    cdef long[::1] row = buf_np
    cdef long i, j, t, x, v, bv, c, u, winv, pw
    stack = []
    cdef long src = 0
    cdef bint from_stack
    while True:
        if stack:
            nxt = stack.pop()
            for t in range(w):
                row[t] = nxt[t]
        elif src < nr:
            for t in range(w):
                row[t] = a[src, t]
            src += 1
        else:
            break
        j = 0
        while j < w:
            x = row[j]
            if x == 0:
                j += 1
                continue
            v = 0
            while v < k and x % powtab[v + 1] == 0:
                v += 1
            bv = pivval[j]
            if bv <= v:
                c = x / powtab[bv]
                for t in range(j, w):
                    row[t] = (row[t] - c * basis[j, t]) % q
                    if row[t] < 0:
                        row[t] += q
                j += 1  # entry cleared exactly
                continue
            # new or stronger pivot at column j
            u = x / powtab[v]
            winv = _modinv(u, q)
            for t in range(j, w):
                row[t] = (row[t] * winv) % q
            if bv <= k:
                stack.append(basis_np[j].copy())
            for t in range(w):
                basis[j, t] = row[t]
            pivval[j] = v
            if v:
                pw = powtab[k - v]
                comp = np.zeros(w, dtype=np.int64)
                for t in range(j, w):
                    comp[t] = (row[t] * pw) % q
                stack.append(comp)
            break
    occ = np.nonzero(pivval_np <= k)[0]
    return occ, basis_np[occ].copy()


def cocycle_violation(table, vals, long q):
    """First (g,h,k) flat index violating the 2-cocycle identity, or -1."""
    table_np = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
    vals_np = np.ascontiguousarray(np.asarray(vals, dtype=np.int64) % q)
    cdef const int[:, ::1] tab = table_np
    cdef const long[:, ::1] f = vals_np
    cdef long n = tab.shape[0]
    cdef long g, h, k2, gh, hk, x
    for g in range(n):
        for h in range(n):
            gh = tab[g, h]
            for k2 in range(n):
                hk = tab[h, k2]
                x = (f[g, h] + f[gh, k2] - f[h, k2] - f[g, hk]) % q
                if x != 0:
                    return g * n * n + h * n + k2
    return -1
