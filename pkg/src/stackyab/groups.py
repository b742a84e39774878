"""Finite groups as validated Cayley tables, plus the abelian-structure toolkit.

Conventions, fixed once and used everywhere:
  * elements are indices 0..n-1 and the identity is always index 0;
  * table[g, h] is the product g*h;
  * permutations act on points 0..m-1 and compose left-to-right:
    (a*b) means "apply a, then b", i.e. (a*b)[x] = b[a[x]];
  * commutators are [g, h] = g^-1 h^-1 g h;
  * generator closures enumerate breadth-first over words, generators in
    index order, so constructed element order is deterministic.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import MAX_ORDER, CapExceeded
from .snf import invariant_factors_of_diagonal, smith_normal_form

_ASSOC_FULL_LIMIT = 256
_ASSOC_SPOT_SAMPLES = 10_000


class FiniteGroup:
    """Immutable finite group given by its full multiplication table."""

    def __init__(self, table, labels=None, name: str | None = None, check: bool = True):
        tab = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1]:
            raise ValueError("Cayley table must be square")
        n = tab.shape[0]
        if n == 0:
            raise ValueError("group cannot be empty")
        self.order = n
        self.table = tab
        self.name = name
        if check:
            self._validate()
        self.inv = self._compute_inverses()
        if labels is not None:
            labels = [str(x) for x in labels]
            if len(labels) != n:
                raise ValueError("labels length must equal the order")
        self.labels = labels
        self.table.flags.writeable = False
        self.inv.flags.writeable = False
        self._orders = None
        self._class_data = None
        self._digest = None

    # -- validation -------------------------------------------------------

    def _validate(self) -> None:
        n, tab = self.order, self.table
        if tab.min() < 0 or tab.max() >= n:
            raise ValueError("table entries out of range")
        idx = np.arange(n, dtype=np.int32)
        if not (np.array_equal(tab[0], idx) and np.array_equal(tab[:, 0], idx)):
            raise ValueError("identity must sit at index 0")
        # rows and columns are permutations (cancellation)
        if not (np.array_equal(np.sort(tab, axis=1), np.broadcast_to(idx, tab.shape))
                and np.array_equal(np.sort(tab, axis=0), np.broadcast_to(idx[:, None], tab.shape))):
            raise ValueError("table is not a latin square")
        if not (tab == 0).any(axis=1).all():
            raise ValueError("missing inverses")
        if n <= _ASSOC_FULL_LIMIT:
            # full associativity sweep, chunked over the first index
            for lo in range(0, n, 32):
                hi = min(lo + 32, n)
                g = np.arange(lo, hi)[:, None, None]
                h = np.arange(n)[None, :, None]
                k = np.arange(n)[None, None, :]
                lhs = tab[tab[g, h], k]
                rhs = tab[g, tab[h, k]]
                if not np.array_equal(lhs, rhs):
                    bad = np.argwhere(lhs != rhs)[0]
                    raise ValueError(
                        f"associativity fails at ({lo + bad[0]}, {bad[1]}, {bad[2]})"
                    )
        else:
            rng = random.Random(0xA55)
            for _ in range(_ASSOC_SPOT_SAMPLES):
                g = rng.randrange(n)
                h = rng.randrange(n)
                k = rng.randrange(n)
                if tab[tab[g, h], k] != tab[g, tab[h, k]]:
                    raise ValueError(f"associativity fails at ({g}, {h}, {k})")

    def _compute_inverses(self) -> np.ndarray:
        inv = np.argmax(self.table == 0, axis=1).astype(np.int32)
        if not np.array_equal(self.table[inv, np.arange(self.order)], np.zeros(self.order, dtype=np.int32)):
            raise ValueError("left and right inverses disagree")
        return inv

    # -- basic operations --------------------------------------------------

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inverse(self, g: int) -> int:
        return int(self.inv[g])

    def conj(self, g: int, t: int) -> int:
        """t^-1 g t."""
        return int(self.table[self.table[self.inv[t], g], t])

    def commutator(self, g: int, h: int) -> int:
        """g^-1 h^-1 g h."""
        t = self.table
        return int(t[t[t[self.inv[g], self.inv[h]], g], h])

    def power(self, g: int, k: int) -> int:
        k = k % self.element_orders()[g]
        out, cur = 0, g
        while k:
            if k & 1:
                out = int(self.table[out, cur])
            cur = int(self.table[cur, cur])
            k >>= 1
        return out

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.order
            orders = np.ones(n, dtype=np.int64)
            for g in range(1, n):
                x, o = g, 1
                while x != 0:
                    x = int(self.table[x, g])
                    o += 1
                orders[g] = o
            orders.flags.writeable = False
            self._orders = orders
        return self._orders

    def conjugacy_classes(self) -> tuple[np.ndarray, list[list[int]]]:
        """(class index per element, classes as sorted member lists)."""
        if self._class_data is None:
            n = self.order
            cid = np.full(n, -1, dtype=np.int64)
            classes: list[list[int]] = []
            idx = np.arange(n)
            for g in range(n):
                if cid[g] >= 0:
                    continue
                orbit = np.unique(self.table[self.table[self.inv, g], idx])
                cid[list(orbit)] = len(classes)
                classes.append([int(x) for x in orbit])
            self._class_data = (cid, classes)
        return self._class_data

    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(self.table.tobytes()).hexdigest()[:16]
        return self._digest

    def label(self, g: int) -> str:
        return self.labels[g] if self.labels else str(g)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def __repr__(self) -> str:
        tag = self.name or "group"
        return f"<{tag} of order {self.order}>"


# -- construction ----------------------------------------------------------


def from_table(table, labels=None, name=None) -> FiniteGroup:
    return FiniteGroup(table, labels=labels, name=name)


def parse_cycles(spec: str, points: int) -> np.ndarray:
    """Parse cycle notation like "(0 1)(2 4 3)" into an image array."""
    img = np.arange(points, dtype=np.int64)
    spec = spec.strip()
    if spec in ("", "()"):
        return img
    if spec.count("(") != spec.count(")") or not spec.startswith("("):
        raise ValueError(f"bad cycle string: {spec!r}")
    for chunk in spec[1:-1].split(")("):
        pts = [int(tok) for tok in chunk.replace(",", " ").split()]
        if len(pts) != len(set(pts)):
            raise ValueError(f"repeated point in cycle {chunk!r}")
        if any(p < 0 or p >= points for p in pts):
            raise ValueError(f"point out of range in cycle {chunk!r}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return img


def _as_permutation(perm, points: int) -> tuple[int, ...]:
    if isinstance(perm, str):
        arr = parse_cycles(perm, points)
    else:
        arr = np.asarray(perm, dtype=np.int64)
        if arr.ndim != 1 or arr.shape[0] != points:
            raise ValueError("permutation image list has wrong length")
    if sorted(arr.tolist()) != list(range(points)):
        raise ValueError("not a permutation")
    return tuple(int(x) for x in arr)


def from_permutations(generators, points: int, max_order: int = MAX_ORDER,
                      name: str | None = None) -> FiniteGroup:
    """Closure of permutation generators; breadth-first word order, identity first."""
    gens = [_as_permutation(g, points) for g in generators]
    ident = tuple(range(points))
    elements: list[tuple[int, ...]] = [ident]
    index = {ident: 0}
    cursor = 0
    while cursor < len(elements):
        base = elements[cursor]
        for gen in gens:
            prod = tuple(gen[base[x]] for x in range(points))  # apply base, then gen
            if prod not in index:
                if len(elements) >= max_order:
                    raise CapExceeded(f"closure exceeds the cap of {max_order}")
                index[prod] = len(elements)
                elements.append(prod)
        cursor += 1
    n = len(elements)
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[tuple(b[a[x]] for x in range(points))]
    labels = [_cycle_label(e) for e in elements]
    grp = FiniteGroup(table, labels=labels, name=name or f"perm group on {points} points")
    grp.permutations = [np.array(e, dtype=np.int64) for e in elements]
    return grp


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = perm[x]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


# -- catalog ---------------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic order must be >= 1")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, labels=[str(i) for i in range(n)], name=f"cyclic {n}")


def trivial() -> FiniteGroup:
    return cyclic(1)


def dihedral(n: int) -> FiniteGroup:
    """Order 2n: elements r^a s^e indexed a + n*e, with s r s = r^-1."""
    if n < 1:
        raise ValueError("dihedral parameter must be >= 1")
    m = 2 * n
    table = np.empty((m, m), dtype=np.int32)
    for a in range(n):
        for e in (0, 1):
            for b in range(n):
                for f in (0, 1):
                    c = (a + (b if e == 0 else -b)) % n
                    table[a + n * e, b + n * f] = c + n * ((e + f) % 2)
    labels = [f"r{a}" for a in range(n)] + [f"r{a}s" for a in range(n)]
    return FiniteGroup(table, labels=labels, name=f"dihedral {n}")


def symmetric(n: int, max_order: int = MAX_ORDER) -> FiniteGroup:
    """All permutations of 0..n-1 in lexicographic one-line order (identity first)."""
    if n < 1:
        raise ValueError("symmetric parameter must be >= 1")
    order = 1
    for k in range(2, n + 1):
        order *= k
    if order > max_order:
        raise CapExceeded(f"symmetric {n} has order {order} > cap {max_order}")
    elements = [tuple(p) for p in itertools.permutations(range(n))]
    index = {p: i for i, p in enumerate(elements)}
    table = np.empty((order, order), dtype=np.int32)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[tuple(b[a[x]] for x in range(n))]
    grp = FiniteGroup(table, labels=[_cycle_label(p) for p in elements], name=f"symmetric {n}")
    grp.permutations = [np.array(p, dtype=np.int64) for p in elements]
    return grp


def _perm_parity(perm: tuple[int, ...]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for s in range(len(perm)):
        if seen[s]:
            continue
        length = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def alternating(n: int, max_order: int = MAX_ORDER) -> FiniteGroup:
    """Even permutations of 0..n-1 in lexicographic one-line order."""
    if n < 1:
        raise ValueError("alternating parameter must be >= 1")
    elements = [tuple(p) for p in itertools.permutations(range(n)) if _perm_parity(tuple(p)) == 0]
    order = len(elements)
    if order > max_order:
        raise CapExceeded(f"alternating {n} has order {order} > cap {max_order}")
    index = {p: i for i, p in enumerate(elements)}
    table = np.empty((order, order), dtype=np.int32)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[tuple(b[a[x]] for x in range(n))]
    grp = FiniteGroup(table, labels=[_cycle_label(p) for p in elements], name=f"alternating {n}")
    grp.permutations = [np.array(p, dtype=np.int64) for p in elements]
    return grp


def quaternion8() -> FiniteGroup:
    """{1, -1, i, -i, j, -j, k, -k} with ij = k."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    # represent as (sign, axis) with axis in {1, i, j, k}
    def unpack(x):
        return (-1 if x & 1 else 1), x >> 1  # axis 0..3

    basis = {  # quaternion unit products: (axis_a, axis_b) -> (sign, axis)
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    table = np.empty((8, 8), dtype=np.int32)
    for a in range(8):
        sa, xa = unpack(a)
        for b in range(8):
            sb, xb = unpack(b)
            s, x = basis[(xa, xb)]
            sign = sa * sb * s
            table[a, b] = (x << 1) | (0 if sign == 1 else 1)
    return FiniteGroup(table, labels=names, name="quaternion 8")


def heisenberg(p: int, max_order: int = MAX_ORDER) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p; (a, b, c) indexed a*p^2 + b*p + c."""
    if p < 2 or any(p % d == 0 for d in range(2, p)):
        raise ValueError("heisenberg parameter must be prime")
    n = p ** 3
    if n > max_order:
        raise CapExceeded(f"heisenberg {p} has order {n} > cap {max_order}")
    a, b, c = np.meshgrid(np.arange(p), np.arange(p), np.arange(p), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    # (a,b,c)*(a',b',c') = (a+a', b+b', c+c'+a*b')
    a2 = (a[:, None] + a[None, :]) % p
    b2 = (b[:, None] + b[None, :]) % p
    c2 = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    table = (a2 * p + b2) * p + c2
    return FiniteGroup(table.astype(np.int32), name=f"heisenberg {p}")


def sl2(p: int, max_order: int = MAX_ORDER) -> FiniteGroup:
    """SL(2, p) for prime p <= 5; identity first, then matrices in lex tuple order."""
    if p not in (2, 3, 5):
        raise ValueError("sl2 is provided for p in {2, 3, 5}")
    mats = []
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    if (a * d - b * c) % p == 1:
                        mats.append((a, b, c, d))
    ident = (1, 0, 0, 1)
    mats.remove(ident)
    mats.insert(0, ident)
    n = len(mats)
    if n > max_order:
        raise CapExceeded(f"sl2 {p} has order {n} > cap {max_order}")
    index = {m: i for i, m in enumerate(mats)}
    table = np.empty((n, n), dtype=np.int32)
    for i, (a, b, c, d) in enumerate(mats):
        for j, (e, f, g, h) in enumerate(mats):
            prod = ((a * e + b * g) % p, (a * f + b * h) % p,
                    (c * e + d * g) % p, (c * f + d * h) % p)
            table[i, j] = index[prod]
    grp = FiniteGroup(table, name=f"SL(2,{p})")
    grp.matrices = mats
    return grp


def direct_product(*groups: FiniteGroup) -> FiniteGroup:
    if not groups:
        return trivial()
    if len(groups) == 1:
        return groups[0]
    g, rest = groups[0], direct_product(*groups[1:])
    n, m = g.order, rest.order
    gi = np.repeat(np.arange(n), m)
    hi = np.tile(np.arange(m), n)
    table = g.table[gi[:, None], gi[None, :]] * m + rest.table[hi[:, None], hi[None, :]]
    name = " x ".join(x.name or "?" for x in groups)
    return FiniteGroup(table.astype(np.int32), name=name)


# -- subgroups and homomorphisms -------------------------------------------


class Subgroup:
    """A subgroup of a parent group, stored as a sorted member list."""

    def __init__(self, parent: FiniteGroup, members):
        mem = sorted({int(x) for x in members})
        if not mem or mem[0] != 0:
            raise ValueError("a subgroup must contain the identity")
        arr = np.array(mem, dtype=np.int64)
        mask = np.zeros(parent.order, dtype=bool)
        mask[arr] = True
        prods = parent.table[np.ix_(arr, arr)]
        if not mask[prods].all():
            raise ValueError("member set is not closed under products")
        if not mask[parent.inv[arr]].all():
            raise ValueError("member set is not closed under inverses")
        self.parent = parent
        self.members = arr
        self.mask = mask
        self.order = len(mem)
        self._local = None

    def contains(self, g: int) -> bool:
        return bool(self.mask[g])

    def local_index(self, g: int) -> int:
        i = int(np.searchsorted(self.members, g))
        if i >= self.order or self.members[i] != g:
            raise KeyError(f"{g} is not a member")
        return i

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """(subgroup as its own FiniteGroup, member array mapping local -> parent)."""
        if self._local is None:
            arr = self.members
            lut = np.full(self.parent.order, -1, dtype=np.int64)
            lut[arr] = np.arange(self.order)
            table = lut[self.parent.table[np.ix_(arr, arr)]]
            labels = [self.parent.label(int(g)) for g in arr]
            grp = FiniteGroup(table.astype(np.int32), labels=labels,
                              name=f"subgroup of order {self.order}")
            self._local = (grp, arr)
        return self._local

    def is_normal(self) -> bool:
        arr = self.members
        conj = self.parent.table[
            self.parent.table[self.parent.inv[:, None], arr[None, :]],
            np.arange(self.parent.order)[:, None],
        ]
        return bool(self.mask[conj].all())

    def __repr__(self) -> str:
        return f"<subgroup of order {self.order} in {self.parent!r}>"


def subgroup_generated(parent: FiniteGroup, generators, max_order: int = MAX_ORDER) -> Subgroup:
    """Closure of element indices under right multiplication by the generators."""
    gens = [int(g) for g in generators]
    seen = np.zeros(parent.order, dtype=bool)
    seen[0] = True
    worklist = [0]
    cursor = 0
    while cursor < len(worklist):
        x = worklist[cursor]
        for s in gens:
            y = int(parent.table[x, s])
            if not seen[y]:
                if len(worklist) >= max_order:
                    raise CapExceeded(f"closure exceeds the cap of {max_order}")
                seen[y] = True
                worklist.append(y)
        cursor += 1
    return Subgroup(parent, worklist)


class GroupHom:
    """Homomorphism between Cayley-table groups, stored as an image array."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images, check: bool = True):
        img = np.asarray(images, dtype=np.int64)
        if img.shape != (source.order,):
            raise ValueError("image array has wrong length")
        if img.min() < 0 or img.max() >= target.order:
            raise ValueError("image out of range")
        if check:
            if img[0] != 0:
                raise ValueError("identity must map to identity")
            lhs = img[source.table]
            rhs = target.table[img[:, None], img[None, :]]
            if not np.array_equal(lhs, rhs):
                g, h = map(int, np.argwhere(lhs != rhs)[0])
                raise ValueError(f"not a homomorphism at ({g}, {h})")
        self.source = source
        self.target = target
        self.images = img
        self.images.flags.writeable = False

    def __call__(self, g: int) -> int:
        return int(self.images[g])

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other (other first)."""
        if other.target is not self.source:
            raise ValueError("composition mismatch")
        return GroupHom(other.source, self.target, self.images[other.images], check=False)

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, np.nonzero(self.images == 0)[0])

    def image(self) -> Subgroup:
        return Subgroup(self.target, np.unique(self.images))

    def is_injective(self) -> bool:
        return len(np.unique(self.images)) == self.source.order

    def is_surjective(self) -> bool:
        return len(np.unique(self.images)) == self.target.order

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, np.arange(g.order), check=False)


def trivial_hom(source: FiniteGroup, target: FiniteGroup) -> GroupHom:
    return GroupHom(source, target, np.zeros(source.order, dtype=np.int64), check=False)


def inclusion_hom(sub: Subgroup) -> GroupHom:
    grp, members = sub.as_group()
    return GroupHom(grp, sub.parent, members, check=False)


# -- structural operations ---------------------------------------------------


def center(g: FiniteGroup) -> Subgroup:
    mask = (g.table == g.table.T).all(axis=1)
    return Subgroup(g, np.nonzero(mask)[0])


def commutator_set(g: FiniteGroup) -> np.ndarray:
    """Sorted distinct values of [x, y] over all pairs."""
    n = g.order
    x = np.arange(n)
    a = g.table[g.inv[:, None], g.inv[None, :]]          # x^-1 y^-1
    b = g.table[a, x[:, None]]                           # x^-1 y^-1 x
    c = g.table[b, x[None, :]]                           # x^-1 y^-1 x y
    return np.unique(c)


def commutator_subgroup(g: FiniteGroup) -> Subgroup:
    return subgroup_generated(g, commutator_set(g), max_order=g.order)


def is_perfect(g: FiniteGroup) -> bool:
    return commutator_subgroup(g).order == g.order


def commutator_width(g: FiniteGroup) -> int:
    """Smallest k with every derived-subgroup element a product of k commutators (0 if abelian)."""
    comms = commutator_set(g)
    derived = commutator_subgroup(g)
    if derived.order == 1:
        return 0
    target = frozenset(int(x) for x in derived.members)
    current = np.unique(comms)
    k = 1
    while frozenset(int(x) for x in current) != target:
        current = np.unique(g.table[np.ix_(current, comms)])
        k += 1
        if k > g.order:
            raise RuntimeError("commutator width failed to stabilize")
    return k


@dataclass
class QuotientResult:
    group: FiniteGroup
    projection: GroupHom
    coset_reps: np.ndarray  # minimal element of each coset, by quotient index


def quotient(g: FiniteGroup, n: Subgroup) -> QuotientResult:
    """Quotient by a normal subgroup; cosets named by their minimal member."""
    if n.parent is not g:
        raise ValueError("subgroup belongs to a different group")
    if not n.is_normal():
        raise ValueError("subgroup is not normal")
    rep = g.table[:, n.members].min(axis=1)
    reps = np.unique(rep)  # sorted; identity coset rep 0 comes first
    lut = np.full(g.order, -1, dtype=np.int64)
    lut[reps] = np.arange(len(reps))
    coset_of = lut[rep]
    table = coset_of[g.table[np.ix_(reps, reps)]]
    q = FiniteGroup(table.astype(np.int32), name=f"{g.name or 'G'} / N({n.order})")
    proj = GroupHom(g, q, coset_of, check=False)
    return QuotientResult(group=q, projection=proj, coset_reps=reps)


# -- finite abelian groups ---------------------------------------------------


class FiniteAbelian:
    """Abelian group in invariant-factor form; elements are residue tuples."""

    def __init__(self, factors):
        factors = [int(d) for d in factors]
        if any(d < 1 for d in factors):
            raise ValueError("factors must be positive")
        norm = invariant_factors_of_diagonal([d for d in factors if d > 1])
        self.invariant_factors = norm
        self.rank = len(norm)
        order = 1
        for d in norm:
            order *= d
        self.order = order
        # mixed-radix weights, last factor fastest
        self.weights = []
        w = 1
        for d in reversed(norm):
            self.weights.append(w)
            w *= d
        self.weights.reverse()

    def index_of(self, tup) -> int:
        tup = tuple(int(x) % d for x, d in zip(tup, self.invariant_factors))
        if len(tup) != self.rank:
            raise ValueError("tuple length mismatch")
        return sum(x * w for x, w in zip(tup, self.weights))

    def tuple_of(self, idx: int) -> tuple[int, ...]:
        if not 0 <= idx < self.order:
            raise ValueError("index out of range")
        out = []
        for d, w in zip(self.invariant_factors, self.weights):
            out.append((idx // w) % d)
        return tuple(out)

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.invariant_factors))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def elements(self):
        return (self.tuple_of(i) for i in range(self.order))

    def element_order(self, a) -> int:
        o = 1
        for x, d in zip(a, self.invariant_factors):
            x = x % d
            if x:
                o = math.lcm(o, d // math.gcd(x, d))
        return o

    def as_group(self) -> FiniteGroup:
        """Cayley table with the mixed-radix element indexing (identity 0)."""
        if self.order == 1:
            return trivial()
        g = cyclic(self.invariant_factors[0])
        for d in self.invariant_factors[1:]:
            g = direct_product(g, cyclic(d))
        return g

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteAbelian) and self.invariant_factors == other.invariant_factors

    def __hash__(self):
        return hash(tuple(self.invariant_factors))

    def __repr__(self) -> str:
        return f"FiniteAbelian({self.invariant_factors})"


def abelian_structure(g: FiniteGroup) -> tuple[FiniteAbelian, np.ndarray]:
    """Invariant factors of an abelian Cayley-table group, with residue coordinates.

    Returns (A, coords) where coords[x] is the tuple of x in A and
    x -> coords[x] is an isomorphism.
    """
    if not g.is_abelian():
        raise ValueError("group is not abelian")
    n = g.order
    if n == 1:
        return FiniteAbelian([]), np.zeros((1, 0), dtype=np.int64)
    # greedy generating set with exponent coordinates for every element
    gens: list[int] = []
    coords: dict[int, tuple[int, ...]] = {0: ()}
    relations: list[list[int]] = []
    for cand in range(1, n):
        if cand in coords:
            continue
        # order of cand modulo the current span, and the membership witness
        m, x = 1, cand
        while x not in coords:
            x = g.mul(x, cand)
            m += 1
        base = coords[x]
        relations.append([int(c) for c in base] + [-m])
        # extend coordinates: every element becomes old + t * cand, 0 <= t < m
        new_coords: dict[int, tuple[int, ...]] = {}
        for elem, tup in coords.items():
            cur = elem
            for t in range(m):
                new_coords[cur] = tup + (t,)
                cur = g.mul(cur, cand)
        if len(new_coords) != len(coords) * m:
            raise RuntimeError("span extension lost elements")
        gens.append(cand)
        coords = new_coords
        if len(coords) == n:
            break
    k = len(gens)
    rel = [row + [0] * (k - len(row)) for row in relations]
    # columns of rel^T generate the relation lattice in Z^k
    res = smith_normal_form(np.array(rel, dtype=object).T if k else [[0]])
    if k == 0:
        return FiniteAbelian([]), np.zeros((n, 0), dtype=np.int64)
    diag = res.diagonal
    if any(d == 0 for d in diag):
        raise RuntimeError("relation lattice is not full rank")
    left = res.left  # w -> left @ w mod diag is the iso
    keep = [i for i, d in enumerate(diag) if d > 1]
    a = FiniteAbelian([diag[i] for i in keep])
    out = np.zeros((n, len(keep)), dtype=np.int64)
    for elem, tup in coords.items():
        w = list(tup)
        for row, i in enumerate(keep):
            s = sum(int(left[i, j]) * w[j] for j in range(k))
            out[elem, row] = s % diag[i]
    if len({tuple(row) for row in out.tolist()}) != n:
        raise RuntimeError("abelian coordinate map is not a bijection")
    return a, out


@dataclass
class AbelianizationResult:
    group: FiniteAbelian
    coords: np.ndarray        # (|G|, rank) residue tuples, the natural map
    quotient: QuotientResult  # G / [G,G]

    def __call__(self, g: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.coords[g])


def abelianization(g: FiniteGroup) -> AbelianizationResult:
    derived = commutator_subgroup(g)
    q = quotient(g, derived)
    a, local = abelian_structure(q.group)
    coords = local[q.projection.images]
    return AbelianizationResult(group=a, coords=coords, quotient=q)


# -- isomorphism search ------------------------------------------------------


def _invariant_signature(g: FiniteGroup) -> tuple:
    orders = g.element_orders()
    cid, classes = g.conjugacy_classes()
    sig = sorted((int(orders[c[0]]), len(c)) for c in classes)
    return tuple(sig)


def _element_signatures(g: FiniteGroup) -> list[tuple[int, int]]:
    orders = g.element_orders()
    cid, classes = g.conjugacy_classes()
    sizes = [len(c) for c in classes]
    return [(int(orders[x]), sizes[cid[x]]) for x in range(g.order)]


def _generating_sequence(g: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = {0}
    for cand in range(1, g.order):
        if cand in span:
            continue
        gens.append(cand)
        # closure of span + cand
        work = sorted(span | {cand})
        seen = set(work)
        cursor = 0
        while cursor < len(work):
            x = work[cursor]
            for s in gens:
                y = g.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    work.append(y)
            cursor += 1
        span = seen
        if len(span) == g.order:
            break
    return gens


def find_isomorphism(g: FiniteGroup, h: FiniteGroup,
                     max_order: int = MAX_ORDER, deadline=None) -> GroupHom | None:
    """Explicit isomorphism g -> h, or None; deterministic backtracking search."""
    if g.order != h.order:
        return None
    if g.order > max_order:
        raise CapExceeded(f"order {g.order} > cap {max_order}")
    if _invariant_signature(g) != _invariant_signature(h):
        return None
    gens = _generating_sequence(g)
    sig_g = _element_signatures(g)
    sig_h = _element_signatures(h)
    candidates = [
        [y for y in range(h.order) if sig_h[y] == sig_g[s]] for s in gens
    ]
    n = g.order
    # per-level closures: elements reachable from gens[:level], each with a
    # (parent, generator) expression so a partial map extends deterministically
    levels = []
    for level in range(1, len(gens) + 1):
        bfs = [0]
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        expr = {0: None}
        cursor = 0
        while cursor < len(bfs):
            x = bfs[cursor]
            for gi in range(level):
                y = g.mul(x, gens[gi])
                if not seen[y]:
                    seen[y] = True
                    expr[y] = (x, gi)
                    bfs.append(y)
            cursor += 1
        members = np.array(bfs, dtype=np.int64)
        sub_products = g.table[np.ix_(members, members)]
        levels.append((bfs, expr, members, sub_products))

    def extend(level: int, images: list[int]) -> np.ndarray | None:
        """Partial map on the level's closure, or None on inconsistency."""
        bfs, expr, members, sub_products = levels[level - 1]
        phi = np.full(n, -1, dtype=np.int64)
        phi[0] = 0
        for x in bfs[1:]:
            parent, gi = expr[x]
            phi[x] = h.table[phi[parent], images[gi]]
        vals = phi[members]
        if len(np.unique(vals)) != len(members):
            return None
        if not np.array_equal(phi[sub_products],
                              h.table[vals[:, None], vals[None, :]]):
            return None
        return phi

    def backtrack(level: int, chosen: list[int]) -> GroupHom | None:
        if deadline is not None:
            deadline.check()
        if level == len(gens):
            phi = extend(level, chosen)
            if phi is None or (phi < 0).any():
                return None
            return GroupHom(g, h, phi, check=False)
        for y in candidates[level]:
            if extend(level + 1, chosen + [y]) is not None:
                result = backtrack(level + 1, chosen + [y])
                if result is not None:
                    return result
        return None

    if not gens:  # trivial group
        return GroupHom(g, h, np.zeros(1, dtype=np.int64), check=False)
    return backtrack(0, [])
