"""Second cohomology with trivial action: cocycles, central extensions, duality.

Solver outline: a normalized 2-cocycle is determined by its rows at a
generating set, because the coboundary of the defect 3-cochain vanishes and
identities anchored at generator first arguments propagate along products.
Each coefficient factor is split into prime powers, solved over Z/p^k where
elimination has no entry growth, and the pieces are recombined by fixed
idempotents.  Representatives are canonicalized per prime part to the
lexicographically minimal table under row-major cell order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import MAX_COHOMOLOGY_ORDER, MAX_ORDER, AxiomFailure, CapExceeded
from .groups import (
    FiniteAbelian,
    FiniteGroup,
    GroupHom,
    Subgroup,
    _generating_sequence,
    is_perfect,
)
from .modsolve import HowellBasis, kernel_mod, quotient_mod, unit_inverse

__all__ = [
    "Cocycle2",
    "CohomologyGroup",
    "CentralExtension",
    "RestrictionMap",
    "QZCohomology",
    "DualityReport",
    "second_cohomology",
    "extension_from_cocycle",
    "cocycle_from_extension",
    "restriction_map",
    "qz_cohomology",
    "schur_multiplier",
    "perfect_duality_check",
]


def _prime_powers(d: int) -> list[tuple[int, int]]:
    """Prime-power decomposition [(p, e), ...] of d in ascending prime order."""
    out = []
    dd = int(d)
    p = 2
    while p * p <= dd:
        if dd % p == 0:
            e = 0
            while dd % p == 0:
                dd //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if dd > 1:
        out.append((dd, 1))
    return out


def _as_abelian(coefficients) -> FiniteAbelian:
    if isinstance(coefficients, FiniteAbelian):
        return coefficients
    return FiniteAbelian(coefficients)


def _idempotent(d: int, pk: int) -> int:
    """The unit of the Z/pk component inside Z/d (pk a prime-power divisor)."""
    rest = d // pk
    return (rest * unit_inverse(rest % pk, pk)) % d


def _merge_invariants(orders: list[int]) -> tuple[list[int], list[list[int]]]:
    """CRT-merge prime-power cyclic orders into an ascending invariant chain.

    Returns (factors, members) where members[j] lists the indices of the
    prime-power inputs combined into factors[j].
    """
    byp: dict[int, list[tuple[int, int]]] = {}
    for i, o in enumerate(orders):
        (p, _e), = _prime_powers(o)
        byp.setdefault(p, []).append((o, i))
    if not byp:
        return [], []
    for p in byp:
        # largest order first; stable on input position
        byp[p].sort(key=lambda t: (-t[0], t[1]))
    nslots = max(len(v) for v in byp.values())
    factors = []
    members = []
    for j in range(nslots):
        d = 1
        mem = []
        for p in sorted(byp):
            if j < len(byp[p]):
                d *= byp[p][j][0]
                mem.append(byp[p][j][1])
        factors.append(d)
        members.append(mem)
    factors.reverse()
    members.reverse()
    return factors, members


# -- cocycles ----------------------------------------------------------------


@dataclass(eq=False)
class Cocycle2:
    """Normalized 2-cocycle on a finite group with trivial abelian coefficients.

    values has shape (rank, n, n); layer i is read modulo invariant factor i.
    """

    group: FiniteGroup
    coefficients: FiniteAbelian
    values: np.ndarray

    def __post_init__(self):
        n = self.group.order
        r = self.coefficients.rank
        vals = np.array(self.values, dtype=np.int64).reshape(r, n, n)
        for i, d in enumerate(self.coefficients.invariant_factors):
            vals[i] %= d
        self.values = vals

    @classmethod
    def zero(cls, group: FiniteGroup, coefficients) -> "Cocycle2":
        a = _as_abelian(coefficients)
        return cls(group, a, np.zeros((a.rank, group.order, group.order), dtype=np.int64))

    def value(self, g: int, h: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.values[:, g, h])

    def is_zero(self) -> bool:
        return not self.values.any()

    def equals(self, other: "Cocycle2") -> bool:
        return (
            self.group is other.group
            and self.coefficients == other.coefficients
            and np.array_equal(self.values, other.values)
        )

    def validate(self) -> None:
        """Check normalization and the cocycle identity on every triple."""
        n = self.group.order
        if self.values[:, 0, :].any() or self.values[:, :, 0].any():
            raise AxiomFailure("cocycle is not normalized at the identity")
        for i, d in enumerate(self.coefficients.invariant_factors):
            bad = kernels.cocycle_violation(self.group.table, self.values[i], d)
            if bad >= 0:
                g, rem = divmod(bad, n * n)
                h, kk = divmod(rem, n)
                raise AxiomFailure(
                    f"cocycle identity fails at layer {i}, triple ({g},{h},{kk})"
                )

    def _combine(self, other: "Cocycle2", sign: int) -> "Cocycle2":
        if self.group is not other.group or self.coefficients != other.coefficients:
            raise ValueError("cocycles live on different pairs (G, A)")
        return Cocycle2(self.group, self.coefficients, self.values + sign * other.values)

    def __add__(self, other: "Cocycle2") -> "Cocycle2":
        return self._combine(other, 1)

    def __sub__(self, other: "Cocycle2") -> "Cocycle2":
        return self._combine(other, -1)

    def __neg__(self) -> "Cocycle2":
        return Cocycle2(self.group, self.coefficients, -self.values)

    def __mul__(self, c: int) -> "Cocycle2":
        return Cocycle2(self.group, self.coefficients, int(c) * self.values)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (
            f"Cocycle2(group order {self.group.order}, "
            f"coefficients {self.coefficients.invariant_factors})"
        )


def coboundary(group: FiniteGroup, coefficients, chain: np.ndarray) -> Cocycle2:
    """The 2-coboundary of a normalized 1-cochain, chain shape (rank, n)."""
    a = _as_abelian(coefficients)
    n = group.order
    c = np.array(chain, dtype=np.int64).reshape(a.rank, n)
    c[:, 0] = 0
    vals = c[:, None, :] - c[:, group.table] + c[:, :, None]
    return Cocycle2(group, a, vals)


# -- prime-power solver ------------------------------------------------------


class _PPSolver:
    """Cocycle solver for one group at one prime-power modulus p^k.

    Unknowns are the generator-row entries of the table; every product edge
    that leaves the spanning tree contributes one block of linear constraints.
    """

    CHUNK = 4096

    def __init__(self, group: FiniteGroup, p: int, k: int):
        self.group = group
        self.p = p
        self.k = k
        self.q = q = p**k
        n = group.order
        self.n = n
        self.gens = gens = _generating_sequence(group)
        self.nu = nu = len(gens) * (n - 1) if n > 1 else 0
        self._basis_tables: list[np.ndarray] | None = None
        self._full_span: HowellBasis | None = None
        if nu == 0:
            self.orders: list[int] = []
            self.K = np.zeros((0, 0), dtype=np.int64)
            self.khow = None
            self.qm = None
            return
        table = group.table
        idx = np.arange(n - 1)

        # spanning tree by left multiplication x = s * y, constraints off-tree
        expr = np.zeros((n, n - 1, nu), dtype=np.int32)
        tree_s = np.full(n, -1, dtype=np.int32)
        tree_y = np.full(n, -1, dtype=np.int32)
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        order_list = [0]
        basis_rows = np.zeros((0, nu), dtype=np.int64)
        pending: list[np.ndarray] = []
        pend = 0
        head = 0
        while head < len(order_list):
            y = order_list[head]
            head += 1
            ey = expr[y]
            m = table[y, 1:]
            mk = m != 0
            for gi, s in enumerate(gens):
                x = int(table[s, y])
                base = gi * (n - 1)
                cand = ey.copy()
                cand[idx[mk], base + m[mk] - 1] += 1
                if y != 0:
                    cand[:, base + y - 1] -= 1
                cand %= q
                if not seen[x]:
                    seen[x] = True
                    tree_s[x] = gi
                    tree_y[x] = y
                    expr[x] = cand
                    order_list.append(x)
                else:
                    block = (cand.astype(np.int64) - expr[x]) % q
                    pending.append(block)
                    pend += n - 1
                    if pend >= self.CHUNK:
                        basis_rows = self._fold(basis_rows, pending)
                        pending = []
                        pend = 0
        basis_rows = self._fold(basis_rows, pending)
        self.order_list = order_list
        self.tree_s = tree_s
        self.tree_y = tree_y

        if basis_rows.shape[0] == 0:
            K = np.eye(nu, dtype=np.int64)
        else:
            K = kernel_mod(basis_rows, p, k)
        self.K = K
        nk = K.shape[1]
        if nk == 0:
            self.orders = []
            self.khow = None
            self.qm = None
            return
        khow = HowellBasis(nu, p, k, naug=nk)
        for j in range(nk):
            khow.insert(K[:, j], tag=j)
        self.khow = khow

        # coboundary generator rows
        B = np.zeros((nu, n - 1), dtype=np.int64)
        for gi, s in enumerate(gens):
            sh = table[s, 1:]
            blk = np.zeros((n - 1, n - 1), dtype=np.int64)
            blk[idx, idx] += 1
            mask = sh != 0
            blk[idx[mask], sh[mask] - 1] -= 1
            blk[:, s - 1] += 1
            B[gi * (n - 1) : (gi + 1) * (n - 1)] = blk % q
        mus = []
        for j in range(n - 1):
            lam = khow.express(B[:, j])
            if lam is None:
                raise AxiomFailure("a coboundary escaped the computed cocycle span")
            mus.append(lam)
        rel = np.concatenate(
            [np.stack(mus, axis=1), kernel_mod(K, p, k)], axis=1
        )
        self.qm = quotient_mod(rel, p, k)
        self.orders = list(self.qm.orders)

    def _fold(self, basis_rows: np.ndarray, pending: list[np.ndarray]) -> np.ndarray:
        if not pending:
            return basis_rows
        stacked = np.unique(np.vstack([basis_rows, *pending]), axis=0)
        if not stacked.any():
            return basis_rows
        _, rows = kernels.echelon(stacked, self.p, self.k)
        return rows

    def table_from_u(self, u: np.ndarray) -> np.ndarray:
        """Rebuild the full table from generator rows along the spanning tree."""
        n, q = self.n, self.q
        u = np.asarray(u, dtype=np.int64) % q
        f = np.zeros((n, n), dtype=np.int64)
        tbl = self.group.table
        for x in self.order_list[1:]:
            gi = int(self.tree_s[x])
            y = int(self.tree_y[x])
            ui = u[gi * (n - 1) : (gi + 1) * (n - 1)]
            m = tbl[y, 1:]
            srow = np.where(m == 0, 0, ui[m - 1])
            t3 = int(ui[y - 1]) if y != 0 else 0
            f[x, 1:] = (f[y, 1:] + srow - t3) % q
        return f

    def coords_of_table(self, tab: np.ndarray) -> np.ndarray:
        """Class coordinates (mod self.orders) of a cocycle table mod p^k."""
        if not self.orders:
            return np.zeros(0, dtype=np.int64)
        u = np.asarray(tab, dtype=np.int64)[self.gens][:, 1:].reshape(-1) % self.q
        lam = self.khow.express(u)
        if lam is None:
            raise AxiomFailure("table is not a cocycle at this modulus")
        return self.qm.coords(lam)

    def basis_tables(self) -> list[np.ndarray]:
        """Canonical full tables representing each cyclic factor generator."""
        if self._basis_tables is None:
            tabs = []
            for j in range(len(self.orders)):
                lam = self.qm.basis()[:, j]
                u = (self.K @ lam) % self.q
                tab = self.canonical_table(self.table_from_u(u))
                bad = kernels.cocycle_violation(self.group.table, tab, self.q)
                if bad >= 0:
                    raise AxiomFailure("solver produced an invalid representative")
                tabs.append(tab)
            self._basis_tables = tabs
        return self._basis_tables

    def _span(self) -> HowellBasis:
        if self._full_span is None:
            n, q = self.n, self.q
            hb = HowellBasis((n - 1) * (n - 1), self.p, self.k)
            for t in range(1, n):
                tab = np.zeros((n, n), dtype=np.int64)
                tab[:, t] += 1
                tab[self.group.table == t] -= 1
                tab[t, :] += 1
                hb.insert((tab[1:, 1:] % q).ravel())
            self._full_span = hb
        return self._full_span

    def canonical_table(self, tab: np.ndarray) -> np.ndarray:
        """Lexicographically minimal table in the coset tab + coboundaries."""
        n = self.n
        if n == 1:
            return np.zeros((1, 1), dtype=np.int64)
        flat = self._span().canonical(np.asarray(tab, dtype=np.int64)[1:, 1:].ravel())
        out = np.zeros((n, n), dtype=np.int64)
        out[1:, 1:] = flat.reshape(n - 1, n - 1)
        return out

    def is_coboundary_table(self, tab: np.ndarray) -> bool:
        if self.n == 1:
            return True
        return self._span().contains(np.asarray(tab, dtype=np.int64)[1:, 1:].ravel())


def _pp_solver(group: FiniteGroup, p: int, k: int) -> _PPSolver:
    cache = group.__dict__.setdefault("_cocycle_solvers", {})
    key = (p, k)
    if key not in cache:
        cache[key] = _PPSolver(group, p, k)
    return cache[key]


# -- H^2(G, A) ---------------------------------------------------------------


@dataclass
class _RawFactor:
    order: int  # prime power p^e
    layer: int  # index into the coefficient invariant factors
    p: int
    k: int  # p^k is the full p-part of the layer modulus
    solver: _PPSolver = field(repr=False)
    pos: int = 0  # position inside solver.orders
    embed: int = 1  # idempotent multiplier Z/p^k -> Z/d_layer


class CohomologyGroup:
    """H^2(G, A) for trivial action, with one basis cocycle per invariant factor."""

    def __init__(self, group: FiniteGroup, coefficients: FiniteAbelian,
                 raw: list[_RawFactor]):
        self.group = group
        self.coefficients = coefficients
        self._raw = raw
        factors, members = _merge_invariants([r.order for r in raw])
        self.factor_orders = factors
        self._members = members
        self.invariant_factors = FiniteAbelian(factors)
        self.basis = [self._member_sum(mem) for mem in members]

    def _raw_cocycle(self, r: _RawFactor) -> Cocycle2:
        a = self.coefficients
        n = self.group.order
        vals = np.zeros((a.rank, n, n), dtype=np.int64)
        d = a.invariant_factors[r.layer]
        vals[r.layer] = (r.solver.basis_tables()[r.pos] * r.embed) % d
        return Cocycle2(self.group, a, vals)

    def _member_sum(self, members: list[int]) -> Cocycle2:
        out = Cocycle2.zero(self.group, self.coefficients)
        for i in members:
            out = out + self._raw_cocycle(self._raw[i])
        return out

    @property
    def order(self) -> int:
        return self.invariant_factors.order

    def rank(self) -> int:
        return len(self.factor_orders)

    def _raw_coords(self, f: Cocycle2) -> np.ndarray:
        if f.group is not self.group or f.coefficients != self.coefficients:
            raise ValueError("cocycle lives on a different pair (G, A)")
        out = np.zeros(len(self._raw), dtype=np.int64)
        for i, r in enumerate(self._raw):
            tab = f.values[r.layer] % (r.p**r.k)
            out[i] = int(r.solver.coords_of_table(tab)[r.pos])
        return out

    def class_coords(self, f: Cocycle2) -> tuple[int, ...]:
        """Coordinates of the class of f, one residue per invariant factor."""
        raw = self._raw_coords(f)
        out = []
        for d, mem in zip(self.factor_orders, self._members):
            c = 0
            for i in mem:
                r = self._raw[i]
                c = (c + int(raw[i]) * _idempotent(d, r.order)) % d
            out.append(c)
        return tuple(out)

    def from_coords(self, coords) -> Cocycle2:
        coords = [int(c) for c in coords]
        if len(coords) != len(self.factor_orders):
            raise ValueError("coordinate length mismatch")
        out = Cocycle2.zero(self.group, self.coefficients)
        for c, b in zip(coords, self.basis):
            out = out + c * b
        return out

    def is_coboundary(self, f: Cocycle2) -> bool:
        return not any(self.class_coords(f))

    def same_class(self, f: Cocycle2, g: Cocycle2) -> bool:
        return self.is_coboundary(f - g)

    def class_order(self, f: Cocycle2) -> int:
        o = 1
        for c, d in zip(self.class_coords(f), self.factor_orders):
            if c:
                o = math.lcm(o, d // math.gcd(c, d))
        return o

    def canonical(self, f: Cocycle2) -> Cocycle2:
        """Per-prime lexicographically minimal representative of the class of f."""
        a = self.coefficients
        n = self.group.order
        vals = np.zeros((a.rank, n, n), dtype=np.int64)
        for layer, d in enumerate(a.invariant_factors):
            for p, e in _prime_powers(d):
                pk = p**e
                solver = _pp_solver(self.group, p, e)
                tab = solver.canonical_table(f.values[layer] % pk)
                vals[layer] = (vals[layer] + _idempotent(d, pk) * tab) % d
        return Cocycle2(self.group, a, vals)

    def __repr__(self) -> str:
        return (
            f"CohomologyGroup(order {self.group.order} group, "
            f"A={self.coefficients.invariant_factors}, "
            f"H2={self.factor_orders})"
        )


def second_cohomology(group: FiniteGroup, coefficients,
                      max_order: int = MAX_COHOMOLOGY_ORDER) -> CohomologyGroup:
    """H^2(G, A) with trivial action, solved per prime power and recombined."""
    if group.order > max_order:
        raise CapExceeded(f"group order {group.order} exceeds cap {max_order}")
    a = _as_abelian(coefficients)
    raw = []
    for layer, d in enumerate(a.invariant_factors):
        for p, e in _prime_powers(d):
            solver = _pp_solver(group, p, e)
            emb = _idempotent(d, p**e)
            for pos, o in enumerate(solver.orders):
                raw.append(
                    _RawFactor(order=o, layer=layer, p=p, k=e,
                               solver=solver, pos=pos, embed=emb)
                )
    return CohomologyGroup(group, a, raw)


# -- central extensions ------------------------------------------------------


@dataclass
class CentralExtension:
    """Central extension of a base group by an abelian kernel."""

    total: FiniteGroup
    projection: GroupHom
    coefficients: FiniteAbelian
    kernel_embedding: np.ndarray  # total-group index of each kernel element

    def validate(self) -> None:
        total = self.total
        a = self.coefficients
        emb = np.asarray(self.kernel_embedding, dtype=np.int64)
        if len(emb) != a.order or len(set(emb.tolist())) != a.order:
            raise AxiomFailure("kernel embedding is not injective")
        tuples = [a.tuple_of(i) for i in range(a.order)]
        for i, x in enumerate(tuples):
            for j, y in enumerate(tuples):
                if total.mul(int(emb[i]), int(emb[j])) != int(emb[a.index_of(a.add(x, y))]):
                    raise AxiomFailure("kernel embedding is not a homomorphism")
        ker = np.nonzero(self.projection.images == 0)[0]
        if sorted(ker.tolist()) != sorted(emb.tolist()):
            raise AxiomFailure("embedded kernel does not match the projection kernel")
        for e in emb:
            if not np.array_equal(total.table[e, :], total.table[:, e]):
                raise AxiomFailure("embedded kernel is not central")

    def __repr__(self) -> str:
        return (
            f"CentralExtension(total order {self.total.order} -> "
            f"base order {self.projection.target.order}, "
            f"kernel {self.coefficients.invariant_factors})"
        )


def extension_from_cocycle(f: Cocycle2) -> CentralExtension:
    """Total group on A x G with multiplication twisted by the cocycle."""
    f.validate()
    g = f.group
    a = f.coefficients
    n = g.order
    na = a.order
    total_order = na * n
    if total_order > MAX_ORDER:
        raise CapExceeded(f"extension order {total_order} exceeds cap {MAX_ORDER}")
    tuples = np.array([a.tuple_of(i) for i in range(na)], dtype=np.int64).reshape(na, a.rank)
    weights = np.array(a.weights, dtype=np.int64)
    mods = np.array(a.invariant_factors, dtype=np.int64)
    # index-level addition table of A and the cocycle offset indices
    sums = (tuples[:, None, :] + tuples[None, :, :]) % mods
    aadd = sums @ weights if a.rank else np.zeros((na, na), dtype=np.int64)
    w = (
        np.tensordot(weights, f.values, axes=1).astype(np.int64)
        if a.rank
        else np.zeros((n, n), dtype=np.int64)
    )
    # (x, g)(y, h) = (x + y + f(g, h), g h); element index is x * n + g
    cidx = aadd[aadd[:, :, None, None], w[None, None, :, :]]
    table = cidx * n + g.table[None, None, :, :]
    table = table.transpose(0, 2, 1, 3).reshape(total_order, total_order)
    total = FiniteGroup(
        table.astype(np.int32),
        name=f"central extension of order {total_order}",
    )
    proj = GroupHom(total, g, np.arange(total_order, dtype=np.int64) % n)
    emb = np.arange(na, dtype=np.int64) * n
    ext = CentralExtension(total, proj, a, emb)
    ext.validate()
    return ext


def cocycle_from_extension(ext: CentralExtension) -> Cocycle2:
    """Read the cocycle of the minimal-index section of a central extension."""
    total = ext.total
    g = ext.projection.target
    a = ext.coefficients
    n = g.order
    proj = np.asarray(ext.projection.images, dtype=np.int64)
    sec = np.full(n, -1, dtype=np.int64)
    for x in range(total.order):
        b = int(proj[x])
        if sec[b] < 0:
            sec[b] = x
    if (sec < 0).any():
        raise AxiomFailure("projection is not surjective")
    back = {int(e): i for i, e in enumerate(ext.kernel_embedding)}
    vals = np.zeros((a.rank, n, n), dtype=np.int64)
    tuples = np.array([a.tuple_of(i) for i in range(a.order)], dtype=np.int64).reshape(
        a.order, a.rank
    )
    for gg in range(n):
        for hh in range(n):
            x = total.mul(total.mul(int(sec[gg]), int(sec[hh])),
                          total.inverse(int(sec[g.mul(gg, hh)])))
            if x not in back:
                raise AxiomFailure("section defect left the embedded kernel")
            vals[:, gg, hh] = tuples[back[x]]
    return Cocycle2(g, a, vals)


# -- restriction -------------------------------------------------------------


@dataclass
class RestrictionMap:
    """Matrix of the restriction H^2(G, A) -> H^2(S, A) over the residue rings."""

    source: CohomologyGroup
    target: CohomologyGroup
    members: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)  # row i is read mod target factor i

    def restrict_cocycle(self, f: Cocycle2) -> Cocycle2:
        sub = self.target.group
        vals = f.values[:, self.members[:, None], self.members[None, :]]
        return Cocycle2(sub, f.coefficients, vals)

    def apply(self, coords) -> tuple[int, ...]:
        coords = np.asarray([int(c) for c in coords], dtype=np.int64)
        if self.matrix.size == 0:
            return tuple(0 for _ in self.target.factor_orders)
        out = self.matrix @ coords
        return tuple(
            int(c) % d for c, d in zip(out, self.target.factor_orders)
        )


def restriction_map(h2: CohomologyGroup, s: Subgroup) -> RestrictionMap:
    """Restriction of classes to a subgroup, as a matrix in the two bases."""
    if s.parent is not h2.group:
        raise ValueError("subgroup does not live in the cohomology group's base")
    sub, members = s.as_group()
    h2s = second_cohomology(sub, h2.coefficients)
    cols = []
    for b in h2.basis:
        vals = b.values[:, members[:, None], members[None, :]]
        cols.append(h2s.class_coords(Cocycle2(sub, h2.coefficients, vals)))
    matrix = (
        np.array(cols, dtype=np.int64).T
        if cols
        else np.zeros((len(h2s.factor_orders), 0), dtype=np.int64)
    )
    return RestrictionMap(h2, h2s, members, matrix)


# -- coefficients in Q/Z -----------------------------------------------------


@dataclass
class _QZPart:
    p: int
    k: int
    solver: _PPSolver = field(repr=False)
    qm: object = field(repr=False)  # quotient of H^2(G, Z/p^k) by the connecting image
    orders: list[int] = field(default_factory=list)
    basis_tables: list[np.ndarray] = field(default_factory=list, repr=False)

    def coords_of_table(self, tab: np.ndarray) -> np.ndarray:
        if not self.orders:
            return np.zeros(0, dtype=np.int64)
        return self.qm.coords(self.solver.coords_of_table(tab))


@dataclass
class QZCohomology:
    """H^2(G, Q/Z): the classes surviving modulo the connecting image.

    Iterates as (structure, basis) with basis cocycles carried one per
    prime-power factor, each over the matching Z/p^k part of Z/|G|.
    """

    group: FiniteGroup
    structure: FiniteAbelian
    basis: list[Cocycle2]
    factor_orders: list[int]  # prime powers aligned with basis
    parts: dict[int, _QZPart] = field(repr=False, default_factory=dict)

    def __iter__(self):
        yield self.structure
        yield self.basis

    @property
    def order(self) -> int:
        o = 1
        for d in self.factor_orders:
            o *= d
        return o

    def class_coords(self, f: Cocycle2) -> tuple[int, ...]:
        """Coordinates (aligned with factor_orders) of a prime-power cocycle.

        The cocycle must carry coefficients [p^k] matching one of the parts;
        coordinates at every other prime are zero.
        """
        facs = f.coefficients.invariant_factors
        if f.group is not self.group or len(facs) != 1:
            raise ValueError("expected a single prime-power coefficient cocycle")
        (p, e), = _prime_powers(facs[0])
        if p not in self.parts or self.parts[p].k != e:
            raise ValueError("coefficient modulus is not a part of Z/|G|")
        c = self.parts[p].coords_of_table(f.values[0])
        out = []
        at = 0
        for q0, b in zip(self.factor_orders, self.basis):
            if b.coefficients.invariant_factors[0] == p**e:
                out.append(int(c[at]))
                at += 1
            else:
                out.append(0)
        return tuple(out)


def _hom_generators(group: FiniteGroup, p: int, k: int) -> np.ndarray:
    """Columns generating Hom(G, Z/p^k) as vectors of values on G."""
    n = group.order
    q = p**k
    i = np.arange(n * n)
    g = i // n
    h = i % n
    rows = np.zeros((n * n, n), dtype=np.int64)
    np.add.at(rows, (i, g), 1)
    np.add.at(rows, (i, h), 1)
    np.add.at(rows, (i, group.table[g, h].astype(np.int64)), -1)
    return kernel_mod(rows % q, p, k)


def _qz_part(group: FiniteGroup, p: int, e: int) -> _QZPart:
    """One prime part of H^2(G, Q/Z), evaluated at modulus p^e.

    Any e with p^e a multiple of the p-part of the multiplier exponent gives
    the same classes; callers restricting from a larger group pass its e.
    """
    cache = group.__dict__.setdefault("_qz_part_cache", {})
    part = cache.get((p, e))
    if part is not None:
        return part
    n = group.order
    q = p**e
    solver = _pp_solver(group, p, e)
    m = len(solver.orders)
    rel = [np.diag(np.array(solver.orders, dtype=np.int64)).reshape(m, m)]
    for phi in _hom_generators(group, p, e).T:
        carry = (phi[:, None] + phi[None, :] - phi[group.table]) // q
        rel.append(solver.coords_of_table(carry).reshape(m, 1))
    qm = quotient_mod(np.concatenate(rel, axis=1), p, e)
    part = _QZPart(p, e, solver, qm, list(qm.orders))
    for j in range(len(qm.orders)):
        y = qm.basis()[:, j]
        tab = np.zeros((n, n), dtype=np.int64)
        for i, b in enumerate(solver.basis_tables()):
            tab = (tab + int(y[i]) * b) % q
        part.basis_tables.append(solver.canonical_table(tab))
    cache[(p, e)] = part
    return part


def qz_cohomology(group: FiniteGroup,
                  max_order: int = MAX_COHOMOLOGY_ORDER) -> QZCohomology:
    """Classes of H^2(G, Z/|G|) modulo the connecting image of Hom(G, Z/|G|).

    The connecting map of 0 -> Z/q -> Z/q^2 -> Z/q -> 0 sends a homomorphism
    to its carry cocycle; dividing by its image leaves the dual of the
    multiplier.  Computed per prime part of |G| and merged by CRT.
    """
    cached = group.__dict__.get("_qz_cache")
    if cached is not None:
        return cached
    n = group.order
    if n > max_order:
        raise CapExceeded(f"group order {n} exceeds cap {max_order}")
    parts: dict[int, _QZPart] = {}
    orders: list[int] = []
    basis: list[Cocycle2] = []
    for p, e in _prime_powers(n):
        part = _qz_part(group, p, e)
        coeff = FiniteAbelian([p**e])
        for j, o in enumerate(part.orders):
            orders.append(o)
            basis.append(
                Cocycle2(group, coeff, part.basis_tables[j].reshape(1, n, n))
            )
        parts[p] = part
    factors, _members = _merge_invariants(orders)
    out = QZCohomology(group, FiniteAbelian(factors), basis, orders, parts)
    group.__dict__["_qz_cache"] = out
    return out


def schur_multiplier(group: FiniteGroup,
                     max_order: int = MAX_COHOMOLOGY_ORDER) -> FiniteAbelian:
    """Invariant factors of the multiplier, read off the Q/Z dual."""
    return qz_cohomology(group, max_order=max_order).structure


# -- duality for perfect groups ----------------------------------------------


@dataclass
class DualityReport:
    """Both sides of the perfect-group counting identity."""

    group: FiniteGroup
    coefficients: FiniteAbelian
    h2_order: int
    hom_order: int
    matched: bool
    h2: CohomologyGroup = field(repr=False)
    multiplier: FiniteAbelian = field(repr=False)


def perfect_duality_check(group: FiniteGroup, coefficients) -> DualityReport:
    """Compare |H^2(G, A)| with |Hom(M(G), A)| for a perfect group G."""
    if not is_perfect(group):
        raise AxiomFailure("group is not perfect")
    a = _as_abelian(coefficients)
    h2 = second_cohomology(group, a)
    mult = schur_multiplier(group)
    hom_order = 1
    for m in mult.invariant_factors:
        for d in a.invariant_factors:
            hom_order *= math.gcd(m, d)
    return DualityReport(
        group=group,
        coefficients=a,
        h2_order=h2.order,
        hom_order=hom_order,
        matched=h2.order == hom_order,
        h2=h2,
        multiplier=mult,
    )
