"""Pure-numpy backend for the elimination and verification hot loops."""

from __future__ import annotations

import numpy as np

from .modsolve import unit_inverse, valuations


def echelon_raw(mat, p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Howell row basis of the span of mat's rows over Z/p^k, batch passes.

    Returns (pivot columns ascending, basis rows in the same order), not yet
    inter-reduced; kernels.echelon canonicalizes.
    """
    q = p ** k
    mat = np.asarray(mat, dtype=np.int64) % q
    if mat.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    w = mat.shape[1]
    powtab = p ** np.arange(k + 1, dtype=np.int64)
    basis = np.zeros((w, w), dtype=np.int64)
    piv_val = np.full(w, k + 1, dtype=np.int64)  # k+1 marks an empty slot
    pending = mat
    while pending.shape[0]:
        pending = pending[pending.any(axis=1)]
        if not pending.shape[0]:
            break
        lead = np.argmax(pending != 0, axis=1)
        ent = pending[np.arange(len(pending)), lead]
        lv = valuations(ent, p, k)
        bv = piv_val[lead]
        red = bv <= lv
        chunks = []
        if red.any():
            rr = pending[red]
            ll = lead[red]
            c = ent[red] // powtab[bv[red]]
            chunks.append((rr - c[:, None] * basis[ll]) % q)
        if (~red).any():
            cand = pending[~red]
            clead = lead[~red]
            cval = lv[~red]
            # per column keep the strongest candidate; rest go around again
            order = np.lexsort((np.arange(len(cand)), cval, clead))
            cand, clead, cval = cand[order], clead[order], cval[order]
            first = np.ones(len(cand), dtype=bool)
            first[1:] = clead[1:] != clead[:-1]
            if (~first).any():
                chunks.append(cand[~first])
            for row, j, v in zip(cand[first], clead[first], cval[first]):
                j, v = int(j), int(v)
                u = int(row[j]) // powtab[v]
                row = (row * unit_inverse(u, q)) % q
                if piv_val[j] <= k:  # weaker pivot displaced, reinsert it
                    chunks.append(basis[j][None, :].copy())
                basis[j] = row
                piv_val[j] = v
                if v:  # Howell completion row
                    chunks.append((powtab[k - v] * row % q)[None, :])
        pending = (
            np.concatenate(chunks, axis=0) if chunks else np.zeros((0, w), dtype=np.int64)
        )
    occ = np.nonzero(piv_val <= k)[0]
    return occ, basis[occ].copy()


def cocycle_violation(table, vals, q: int) -> int:
    """First (g,h,k) flat index violating the 2-cocycle identity, or -1."""
    table = np.asarray(table)
    f = np.asarray(vals, dtype=np.int64) % q
    n = table.shape[0]
    for g in range(n):
        bad = (f[g][:, None] + f[table[g]] - f - f[g][table]) % q
        nz = np.nonzero(bad)
        if len(nz[0]):
            return g * n * n + int(nz[0][0]) * n + int(nz[1][0])
    return -1
