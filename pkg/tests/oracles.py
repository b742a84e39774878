"""Brute-force oracles for the cohomology tests, kept independent of the solver."""

from __future__ import annotations

import math

import numpy as np

ENUM_LIMIT = 2**19


def _all_normalized_cochains(n: int, q: int) -> np.ndarray:
    """Every normalized 2-cochain as an (M, n, n) array, mixed-radix order."""
    cells = (n - 1) * (n - 1)
    m = q**cells
    if m > ENUM_LIMIT:
        raise ValueError(f"enumeration of {m} cochains refused")
    idx = np.arange(m)
    flat = np.zeros((m, cells), dtype=np.int64)
    for c in range(cells):
        flat[:, cells - 1 - c] = (idx // q**c) % q
    out = np.zeros((m, n, n), dtype=np.int64)
    out[:, 1:, 1:] = flat.reshape(m, n - 1, n - 1)
    return out


def _identity_holds(table: np.ndarray, fs: np.ndarray, q: int) -> np.ndarray:
    """Boolean mask of which stacked tables satisfy the cocycle identity."""
    n = table.shape[0]
    g, h, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    gh = table[g, h]
    hk = table[h, k]
    lhs = fs[:, g, h] + fs[:, gh, k]
    rhs = fs[:, h, k] + fs[:, g, hk]
    return ((lhs - rhs) % q == 0).reshape(fs.shape[0], -1).all(axis=1)


def coboundary_tables(table: np.ndarray, q: int) -> list[np.ndarray]:
    """All distinct coboundaries of normalized 1-cochains."""
    n = table.shape[0]
    if q ** (n - 1) > ENUM_LIMIT:
        raise ValueError("coboundary enumeration refused")
    seen = {}
    idx = np.arange(q ** (n - 1))
    for i in idx:
        c = np.zeros(n, dtype=np.int64)
        for t in range(n - 1):
            c[t + 1] = (i // q**t) % q
        tab = (c[None, :] - c[table] + c[:, None]) % q
        seen.setdefault(tab.tobytes(), tab)
    return list(seen.values())


def brute_h2(table: np.ndarray, q: int) -> dict:
    """Enumerated H^2 data: counts, class orders, and lex-minimal class reps."""
    n = table.shape[0]
    fs = _all_normalized_cochains(n, q)
    fs = fs[_identity_holds(table, fs, q)]
    cobs = coboundary_tables(table, q)
    cob_bytes = {cb.tobytes() for cb in cobs}
    assigned: set[bytes] = set()
    reps = []
    for f in fs:
        if f.tobytes() in assigned:
            continue
        coset = [(f + cb) % q for cb in cobs]
        for t in coset:
            assigned.add(t.tobytes())
        reps.append(min(coset, key=lambda t: t[1:, 1:].ravel().tolist()))
    class_orders = []
    for r in reps:
        m = 1
        while ((m * r) % q).tobytes() not in cob_bytes:
            m += 1
        class_orders.append(m)
    return {
        "z2": len(fs),
        "b2": len(cobs),
        "order": len(fs) // len(cobs),
        "class_orders": sorted(class_orders),
        "lexmin_reps": reps,
    }


class _ModPEliminator:
    """Streaming row elimination over GF(p), tracking only the rank."""

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.basis = np.zeros((ncols, ncols), dtype=np.int16)
        self.occupied = np.zeros(ncols, dtype=bool)

    def feed(self, chunk: np.ndarray) -> None:
        p = self.p
        chunk = np.asarray(chunk, dtype=np.int16) % p
        while chunk.shape[0]:
            nz = chunk != 0
            alive = nz.any(axis=1)
            chunk = chunk[alive]
            if not chunk.shape[0]:
                break
            lead = np.argmax(chunk != 0, axis=1)
            red = self.occupied[lead]
            if red.any():
                c = chunk[red, lead[red]].astype(np.int32)
                chunk[red] = (chunk[red] - c[:, None] * self.basis[lead[red]].astype(np.int32)) % p
            fresh = np.nonzero(~red)[0]
            if fresh.size:
                cols, first = np.unique(lead[fresh], return_index=True)
                for j, i in zip(cols, first):
                    row = chunk[fresh[i]].astype(np.int64)
                    inv = pow(int(row[j]), -1, p)
                    self.basis[j] = (row * inv) % p
                    self.occupied[j] = True
                keep = np.ones(chunk.shape[0], dtype=bool)
                keep[fresh[first]] = False
                chunk = chunk[keep]
            else:
                continue

    @property
    def rank(self) -> int:
        return int(self.occupied.sum())


def z2_dim_modp(table: np.ndarray, p: int, chunk_rows: int = 8192) -> int:
    """Dimension of the normalized cocycle space over GF(p), all triples fed."""
    n = table.shape[0]
    cells = (n - 1) * (n - 1)

    def cell(x, y):
        # -1 marks terms killed by normalization
        good = (x > 0) & (y > 0)
        return np.where(good, (x - 1) * (n - 1) + (y - 1), -1)

    elim = _ModPEliminator(cells, p)
    total = n * n * n
    for start in range(0, total, chunk_rows):
        idx = np.arange(start, min(start + chunk_rows, total))
        g = idx // (n * n)
        rem = idx % (n * n)
        h = rem // n
        k = rem % n
        rows = np.zeros((idx.size, cells + 1), dtype=np.int16)
        r = np.arange(idx.size)
        # +f(g,h) +f(gh,k) -f(h,k) -f(g,hk); dropped terms land in the spare column
        np.add.at(rows, (r, cell(g, h)), 1)
        np.add.at(rows, (r, cell(table[g, h], k)), 1)
        np.add.at(rows, (r, cell(h, k)), -1)
        np.add.at(rows, (r, cell(g, table[h, k])), -1)
        elim.feed(rows[:, :cells])
    return cells - elim.rank


def b2_dim_modp(table: np.ndarray, p: int) -> int:
    """Dimension of the coboundary space over GF(p)."""
    n = table.shape[0]
    cells = (n - 1) * (n - 1)
    elim = _ModPEliminator(cells, p)
    rows = np.zeros((n - 1, cells), dtype=np.int16)
    for t in range(1, n):
        tab = np.zeros((n, n), dtype=np.int16)
        tab[:, t] += 1
        tab[table == t] -= 1
        tab[t, :] += 1
        rows[t - 1] = tab[1:, 1:].reshape(-1)
    elim.feed(rows)
    return elim.rank


def h2_order_modp(table: np.ndarray, p: int) -> int:
    """|H^2(G, Z/p)| by rank counting over GF(p)."""
    return p ** (z2_dim_modp(table, p) - b2_dim_modp(table, p))


def count_involutions(table: np.ndarray) -> int:
    n = table.shape[0]
    return sum(1 for x in range(1, n) if table[x, x] == 0)


def prime_power_multiset(factors) -> list[int]:
    """Split cyclic orders into their prime-power parts, sorted."""
    out = []
    for d in factors:
        d = int(d)
        p = 2
        while p * p <= d:
            if d % p == 0:
                pe = 1
                while d % p == 0:
                    pe *= p
                    d //= p
                out.append(pe)
            p += 1
        if d > 1:
            out.append(d)
    return sorted(out)


def invariants_from_class_orders(orders) -> list[int]:
    """Prime-power multiset of an abelian group given all its element orders."""
    orders = [int(o) for o in orders]
    out = []
    for p in sorted({p for o in orders for p in _primes_of(o)}):
        emax = 0
        for o in orders:
            e = 0
            while o % p == 0:
                o //= p
                e += 1
            emax = max(emax, e)
        # counts killed by p^j give the conjugate of the exponent partition
        lam = [
            round(math.log(sum(1 for o in orders if p**j % o == 0), p))
            for j in range(emax + 1)
        ]
        geq = [lam[j] - lam[j - 1] for j in range(1, emax + 1)]
        for j in range(1, emax + 1):
            cnt = geq[j - 1] - (geq[j] if j < emax else 0)
            out.extend([p**j] * cnt)
    return sorted(out)


def _primes_of(n: int) -> list[int]:
    out = []
    d = int(n)
    p = 2
    while p * p <= d:
        if d % p == 0:
            out.append(p)
            while d % p == 0:
                d //= p
        p += 1
    if d > 1:
        out.append(d)
    return out
