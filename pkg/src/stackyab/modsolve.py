"""Linear algebra over Z/p^k: Howell-form row bases and local Smith forms.

Z/p^k is a local ring, so every echelon pivot normalizes to a power of p and
clears exactly; no intermediate entry ever leaves [0, p^k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def valuations(a, p: int, k: int) -> np.ndarray:
    """Elementwise p-adic valuation of residues mod p^k, with val(0) = k."""
    rem = np.asarray(a, dtype=np.int64) % (p ** k)
    out = np.zeros(rem.shape, dtype=np.int64)
    hit = np.ones(rem.shape, dtype=bool)
    m = 1
    for _ in range(k):
        m *= p
        hit = hit & (rem % m == 0)
        out += hit
    return out


def unit_inverse(u: int, q: int) -> int:
    """Inverse of a unit mod q."""
    return pow(int(u) % q, -1, q)


class HowellBasis:
    """Streaming Howell-form basis of a row span in (Z/p^k)^ncols.

    Rows may carry an augmentation tail that tracks how each basis row is
    expressed in the originally inserted vectors.
    """

    def __init__(self, ncols: int, p: int, k: int, naug: int = 0):
        if p < 2 or k < 1:
            raise ValueError("modulus must be a nontrivial prime power")
        self.p = p
        self.k = k
        self.q = p ** k
        self.ncols = ncols
        self.naug = naug
        self.rows: dict[int, np.ndarray] = {}  # pivot column -> full row
        self.pivval: dict[int, int] = {}  # pivot column -> valuation
        self._ninserted = 0

    def _normalize(self, r: np.ndarray, j: int, v: int) -> np.ndarray:
        u = int(r[j]) // self.p ** v
        return (r * unit_inverse(u, self.q)) % self.q

    def insert(self, vec, tag: int | None = None) -> None:
        """Add a vector to the span; tag marks its augmentation unit slot."""
        row = np.zeros(self.ncols + self.naug, dtype=np.int64)
        row[: self.ncols] = np.asarray(vec, dtype=np.int64) % self.q
        if tag is not None:
            if not self.naug:
                raise ValueError("basis has no augmentation columns")
            row[self.ncols + tag] = 1
        self._ninserted += 1
        work = [row]
        while work:
            r = work.pop()
            while True:
                nz = np.nonzero(r[: self.ncols])[0]
                if not len(nz):
                    break
                j = int(nz[0])
                v = int(valuations(r[j], self.p, self.k))
                if j not in self.rows:
                    r = self._normalize(r, j, v)
                    self.rows[j] = r
                    self.pivval[j] = v
                    if v:  # Howell completion keeps greedy reduction complete
                        work.append((self.p ** (self.k - v) * r) % self.q)
                    break
                vo = self.pivval[j]
                if v < vo:
                    r = self._normalize(r, j, v)
                    old = self.rows[j]
                    self.rows[j] = r
                    self.pivval[j] = v
                    if v:
                        work.append((self.p ** (self.k - v) * r) % self.q)
                    r = (old - self.p ** (vo - v) * r) % self.q
                else:
                    c = int(r[j]) // self.p ** vo
                    r = (r - c * self.rows[j]) % self.q

    def reduce(self, vec, canonical: bool = False) -> np.ndarray:
        """Reduce against the basis; the first ncols of the result are the residue.

        Exact mode clears a pivot column only when divisible by the pivot, so a
        zero residue certifies membership.  Canonical mode range-reduces every
        pivot column into [0, p^v), giving the unique coset representative.
        """
        r = np.zeros(self.ncols + self.naug, dtype=np.int64)
        r[: self.ncols] = np.asarray(vec, dtype=np.int64) % self.q
        for j in sorted(self.rows):
            x = int(r[j])
            if not x:
                continue
            pv = self.p ** self.pivval[j]
            if canonical or x % pv == 0:
                r = (r - (x // pv) * self.rows[j]) % self.q
        return r

    def contains(self, vec) -> bool:
        """Membership test for the row span."""
        return not self.reduce(vec)[: self.ncols].any()

    def express(self, vec) -> np.ndarray | None:
        """Coefficients over the inserted vectors, or None if not in the span."""
        if not self.naug:
            raise ValueError("basis was built without augmentation columns")
        r = self.reduce(vec)
        if r[: self.ncols].any():
            return None
        return (-r[self.ncols :]) % self.q

    def canonical(self, vec) -> np.ndarray:
        """Unique coset representative of vec modulo the span."""
        return self.reduce(vec, canonical=True)[: self.ncols]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class LocalSNF:
    """U @ a @ V = diag(p^vals) over Z/p^k, with tracked mod-q inverses."""

    p: int
    k: int
    shape: tuple[int, int]
    vals: list[int]
    U: np.ndarray
    Uinv: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def pivots(self) -> list[int]:
        return [self.p ** v for v in self.vals]

    def verify(self, a) -> bool:
        q = self.q
        m, n = self.shape
        d = (self.U @ (np.asarray(a, dtype=np.int64) % q) @ self.V) % q
        want = np.zeros((m, n), dtype=np.int64)
        for i, v in enumerate(self.vals):
            want[i, i] = self.p ** v
        if (d != want).any():
            return False
        if ((self.U @ self.Uinv) % q != np.eye(m, dtype=np.int64)).any():
            return False
        return not ((self.V @ self.Vinv) % q != np.eye(n, dtype=np.int64)).any()


def local_snf(a, p: int, k: int, need_left: bool = True, need_right: bool = True) -> LocalSNF:
    """Smith form over Z/p^k: min-valuation pivoting, exact clearing, no growth."""
    q = p ** k
    a = np.array(np.asarray(a, dtype=np.int64) % q, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    m, n = a.shape
    U = np.eye(m, dtype=np.int64) if need_left else np.zeros((0, 0), dtype=np.int64)
    Uinv = U.copy()
    V = np.eye(n, dtype=np.int64) if need_right else np.zeros((0, 0), dtype=np.int64)
    Vinv = V.copy()
    vals: list[int] = []
    for t in range(min(m, n)):
        sub = a[t:, t:]
        vv = valuations(sub, p, k)
        flat = int(np.argmin(vv))
        v = int(vv.flat[flat])
        if v >= k:
            break
        i, j = divmod(flat, n - t)
        i += t
        j += t
        if i != t:
            a[[t, i]] = a[[i, t]]
            if need_left:
                U[[t, i]] = U[[i, t]]
                Uinv[:, [t, i]] = Uinv[:, [i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            if need_right:
                V[:, [t, j]] = V[:, [j, t]]
                Vinv[[t, j]] = Vinv[[j, t]]
        pv = p ** v
        u = int(a[t, t]) // pv
        if u != 1:
            w = unit_inverse(u, q)
            a[t] = (a[t] * w) % q
            if need_left:
                U[t] = (U[t] * w) % q
                Uinv[:, t] = (Uinv[:, t] * u) % q
        f = a[t + 1 :, t] // pv
        if f.any():
            a[t + 1 :] = (a[t + 1 :] - np.outer(f, a[t])) % q
            if need_left:
                U[t + 1 :] = (U[t + 1 :] - np.outer(f, U[t])) % q
                Uinv[:, t] = (Uinv[:, t] + Uinv[:, t + 1 :] @ f) % q
        g = a[t, t + 1 :] // pv
        if g.any():
            a[:, t + 1 :] = (a[:, t + 1 :] - np.outer(a[:, t], g)) % q
            if need_right:
                V[:, t + 1 :] = (V[:, t + 1 :] - np.outer(V[:, t], g)) % q
                Vinv[t, :] = (Vinv[t, :] + g @ Vinv[t + 1 :, :]) % q
        vals.append(v)
    return LocalSNF(p, k, (m, n), vals, U, Uinv, V, Vinv)


def kernel_mod(mat, p: int, k: int) -> np.ndarray:
    """Columns generating {x : mat @ x == 0 over Z/p^k}."""
    mat = np.asarray(mat, dtype=np.int64)
    q = p ** k
    s = local_snf(mat, p, k, need_left=False)
    n = mat.shape[1]
    cols = []
    for i, v in enumerate(s.vals):
        if v > 0:
            cols.append((p ** (k - v) * s.V[:, i]) % q)
    for i in range(len(s.vals), n):
        cols.append(s.V[:, i])
    if not cols:
        return np.zeros((n, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


@dataclass
class QuotientMod:
    """Structure of (Z/p^k)^n modulo a span, with coordinates in the quotient."""

    p: int
    k: int
    n: int
    orders: list[int]  # per nontrivial cyclic factor
    positions: list[int] = field(repr=False)
    U: np.ndarray = field(repr=False)
    Uinv: np.ndarray = field(repr=False)

    def coords(self, x) -> np.ndarray:
        """Coordinates of x in the nontrivial factors of the quotient."""
        y = (self.U @ (np.asarray(x, dtype=np.int64) % (self.p ** self.k))) % (self.p ** self.k)
        return np.array(
            [int(y[pos]) % o for pos, o in zip(self.positions, self.orders)], dtype=np.int64
        )

    def basis(self) -> np.ndarray:
        """Columns representing a generator of each nontrivial factor."""
        if not self.positions:
            return np.zeros((self.n, 0), dtype=np.int64)
        return self.Uinv[:, self.positions] % (self.p ** self.k)


def quotient_mod(gens, p: int, k: int) -> QuotientMod:
    """Quotient of (Z/p^k)^n by the span of the given generator columns."""
    gens = np.asarray(gens, dtype=np.int64)
    n = gens.shape[0]
    s = local_snf(gens, p, k, need_right=False)
    orders = []
    positions = []
    for i in range(n):
        o = p ** s.vals[i] if i < len(s.vals) else p ** k
        if o > 1:
            orders.append(o)
            positions.append(i)
    return QuotientMod(p, k, n, orders, positions, s.U, s.Uinv)
