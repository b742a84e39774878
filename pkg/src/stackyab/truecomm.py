"""True commutator covers, stacky abelianizations, universal factorizations.

The covering classes of a group restrict to its derived subgroup; the image
of that restriction (on Q/Z-valued class duals) is a finite abelian group
A_un.  The central extension of [G,G] it classifies is the true commutator:
its quotient groupoid [G / cover] is a strictly commutative Picard
presentation with pi0 = G^ab and pi1 = A_un.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cohomology import (
    CentralExtension,
    Cocycle2,
    _qz_part,
    extension_from_cocycle,
    qz_cohomology,
    schur_multiplier,
    second_cohomology,
)
from .crossed import (
    QuotientGroupoid,
    StableBracket,
    check_strictly_stable,
    first_iso,
    FirstIsoResult,
    quotient_groupoid,
    restriction_of_extension,
    stable_from_lift,
)
from .errors import (
    MAX_COHOMOLOGY_ORDER,
    MAX_ORDER,
    NO_DEADLINE,
    AxiomFailure,
)
from .groups import (
    FiniteAbelian,
    FiniteGroup,
    GroupHom,
    Subgroup,
    _generating_sequence,
    abelian_structure,
    abelianization,
    commutator_subgroup,
    is_perfect,
    subgroup_generated,
)
from .modsolve import kernel_mod, quotient_mod

__all__ = [
    "AunResult",
    "TrueCommutatorResult",
    "P1Report",
    "P3Report",
    "StackyAbelianization",
    "FactorizationResult",
    "aun",
    "true_commutator",
    "verify_p1",
    "verify_p3",
    "stacky_abelianization",
    "universal_factorization",
]


# -- the restriction image on covering duals ----------------------------------


@dataclass
class _AunPrime:
    """One prime of the restriction image, held at the parent group's modulus."""

    p: int
    k: int
    spart: object = field(repr=False)       # Q/Z part of [G,G] at modulus p^k
    image_gens: np.ndarray = field(repr=False)  # restricted classes, scaled into (Z/p^k)^t
    image_qm: object = field(repr=False)    # quotient by the image span (membership test)
    image_order: int = 1
    orders: list[int] = field(default_factory=list)


@dataclass
class AunResult:
    """Structure and witnesses of the restriction image on covering duals."""

    group: FiniteGroup
    base: Subgroup
    structure: FiniteAbelian
    prime_orders: list[int]
    witnesses: list[Cocycle2]
    parts: dict[int, _AunPrime] = field(repr=False, default_factory=dict)

    def __iter__(self):
        yield self.structure
        yield self.witnesses


def aun(group: FiniteGroup, max_order: int = MAX_COHOMOLOGY_ORDER) -> AunResult:
    """Image of restriction from G's covering class duals to those of [G,G].

    Computed per prime at the modulus p^(v_p of |G|), so the restricted
    tables live in the same residue ring as the parent classes; the image
    subgroup's invariant factors and generating witness classes are read off
    a kernel-then-quotient pass over that ring.
    """
    s = commutator_subgroup(group)
    sub, mem = s.as_group()
    out = AunResult(group, s, FiniteAbelian([]), [], [])
    if sub.order == 1:
        return out
    qz = qz_cohomology(group, max_order=max_order)
    for p in sorted(qz.parts):
        gpart = qz.parts[p]
        if not gpart.orders:
            continue
        q = p**gpart.k
        spart = _qz_part(sub, p, gpart.k)
        if not spart.orders:
            continue
        restricted = [tab[np.ix_(mem, mem)] for tab in gpart.basis_tables]
        v = np.stack([spart.coords_of_table(tab) for tab in restricted], axis=1)
        scale = q // np.array(spart.orders, dtype=np.int64)
        vs = (scale[:, None] * v) % q
        qm = quotient_mod(kernel_mod(vs, p, gpart.k), p, gpart.k)
        if not qm.orders:
            continue
        image_order = 1
        for o in qm.orders:
            image_order *= int(o)
        combos = qm.basis()
        coeff = FiniteAbelian([q])
        ns = sub.order
        for j, o in enumerate(qm.orders):
            tab = np.zeros((ns, ns), dtype=np.int64)
            for i, r in enumerate(restricted):
                c = int(combos[i, j])
                if c:
                    tab = (tab + c * r) % q
            tab = spart.solver.canonical_table(tab)
            out.witnesses.append(Cocycle2(sub, coeff, tab.reshape(1, ns, ns)))
            out.prime_orders.append(int(o))
        out.parts[p] = _AunPrime(
            p, gpart.k, spart, vs, quotient_mod(vs, p, gpart.k),
            image_order, [int(o) for o in qm.orders],
        )
    out.structure = FiniteAbelian(out.prime_orders)
    return out


# -- the canonical cover -------------------------------------------------------


def _p_valuation(d: int, p: int) -> int:
    v = 0
    while d % p == 0:
        d //= p
        v += 1
    return v


def _dual_image_matches(x: Cocycle2, ar: AunResult) -> bool:
    """Does the class x dualize exactly onto the restriction image?

    Each dual generator of the coefficient group sends x to a covering class
    of the base; x classifies the canonical epimorphism precisely when those
    classes generate the whole image and nothing outside it.
    """
    factors = ar.structure.invariant_factors
    for p, part in ar.parts.items():
        q = p**part.k
        scale = q // np.array(part.spart.orders, dtype=np.int64)
        cols = []
        for i, d in enumerate(factors):
            vp = _p_valuation(d, p)
            if vp == 0:
                continue
            rest = d // p**vp
            mult = (q // p**vp) * pow(rest, -1, p**vp) % q
            w = part.spart.coords_of_table((mult * x.values[i]) % q)
            cols.append((scale * w) % q)
        ws = np.stack(cols, axis=1)
        for c in ws.T:
            if part.image_qm.coords(c).any():
                return False
        sub_qm = quotient_mod(kernel_mod(ws, p, part.k), p, part.k)
        o = 1
        for d0 in sub_qm.orders:
            o *= int(d0)
        if o != part.image_order:
            return False
    return True


@dataclass
class TrueCommutatorResult:
    """The derived subgroup, A_un, and (when classifiable) the canonical cover."""

    group: FiniteGroup
    base: Subgroup
    aun: FiniteAbelian
    cover: CentralExtension | None
    witness_classes: list[Cocycle2]
    needs_splitting_choice: bool
    aun_data: AunResult = field(repr=False, default=None)


def true_commutator(group: FiniteGroup,
                    max_order: int = MAX_COHOMOLOGY_ORDER) -> TrueCommutatorResult:
    """Cover of [G,G] classified by the canonical epimorphism onto A_un's dual.

    The class is pinned down when [G,G] is perfect (covering classes are then
    dual maps on the multiplier) or when A_un is trivial (the zero extension);
    otherwise the choice needs a splitting and the result says so instead of
    guessing one.
    """
    cached = group.__dict__.get("_true_commutator_cache")
    if cached is not None:
        return cached
    ar = aun(group, max_order=max_order)
    sub, _mem = ar.base.as_group()
    cover = None
    needs_choice = False
    if ar.structure.order == 1:
        cover = extension_from_cocycle(Cocycle2.zero(sub, ar.structure))
    elif is_perfect(sub):
        h2 = second_cohomology(sub, ar.structure, max_order=max_order)
        for coords in itertools.product(*(range(d) for d in h2.factor_orders)):
            x = h2.from_coords(coords)
            if _dual_image_matches(x, ar):
                cover = extension_from_cocycle(x)
                break
        if cover is None:
            raise AxiomFailure("no covering class dualizes onto the restriction image")
    else:
        needs_choice = True
    if cover is not None:
        if list(cover.coefficients.invariant_factors) != list(ar.structure.invariant_factors):
            raise AxiomFailure("cover kernel does not match aun")
        if cover.projection.target is not sub:
            raise AxiomFailure("cover does not project onto the derived subgroup")
        if is_perfect(sub) and not is_perfect(cover.total):
            raise AxiomFailure("cover of a perfect derived subgroup must be perfect")
    out = TrueCommutatorResult(group, ar.base, ar.structure, cover,
                               list(ar.witnesses), needs_choice, ar)
    group.__dict__["_true_commutator_cache"] = out
    return out


# -- P1: pullbacks of covers die on the cover ----------------------------------


@dataclass
class P1Report:
    """Certificate that parent covering classes pull back trivially."""

    ok: bool
    checked: int
    failures: list[tuple[tuple[int, ...], tuple[int, ...]]]  # (coefficients, class coords)


def verify_p1(group: FiniteGroup, t: TrueCommutatorResult, coefficient_list,
              max_order: int = MAX_COHOMOLOGY_ORDER) -> P1Report:
    """Restrict each basis class of H^2(G, A) to [G,G], pull back, certify zero."""
    if t.cover is None:
        raise AxiomFailure("cover absent: construction requires a splitting choice")
    _sub, mem = t.base.as_group()
    total = t.cover.total
    to_parent = mem[np.asarray(t.cover.projection.images, dtype=np.int64)]
    failures = []
    checked = 0
    for coeff in coefficient_list:
        h2 = second_cohomology(group, coeff, max_order=max_order)
        h2c = second_cohomology(total, h2.coefficients, max_order=max_order)
        for b in h2.basis:
            vals = b.values[:, to_parent[:, None], to_parent[None, :]]
            checked += 1
            if not h2c.is_coboundary(Cocycle2(total, h2.coefficients, vals)):
                failures.append(
                    (tuple(h2.coefficients.invariant_factors), h2.class_coords(b))
                )
    return P1Report(not failures, checked, failures)


# -- P3: a stable bracket descends from some cover of G -------------------------


def _abelian_types(order: int):
    """Prime-power factor lists of every abelian group of the given order."""
    def partitions(k: int):
        if k == 0:
            yield ()
            return
        for first in range(k, 0, -1):
            for rest in partitions(k - first):
                if not rest or first >= rest[0]:
                    yield (first,) + rest

    factored = []
    d, left = 2, order
    while d * d <= left:
        if left % d == 0:
            e = 0
            while left % d == 0:
                left //= d
                e += 1
            factored.append((d, e))
        d += 1
    if left > 1:
        factored.append((left, 1))
    choices = [
        [tuple(p**a for a in lam) for lam in partitions(e)] for p, e in factored
    ]
    for combo in itertools.product(*choices):
        yield tuple(sorted(x for grp in combo for x in grp))


def _admits_embedding(a_factors, b_factors) -> bool:
    """Whether the abelian group with factors a embeds in the one with factors b."""
    def per_prime(factors):
        by_p: dict[int, list[int]] = {}
        for d in factors:
            p = min(q for q in range(2, d + 1) if d % q == 0)
            by_p.setdefault(p, []).append(_p_valuation(d, p))
        return by_p

    pa, pb = per_prime(list(a_factors)), per_prime(list(b_factors))
    for p, lam in pa.items():
        mu = sorted(pb.get(p, []), reverse=True)
        lam = sorted(lam, reverse=True)
        # conjugate-partition dominance characterizes p-group embeddings
        for j in range(1, lam[0] + 1):
            if sum(1 for x in lam if x >= j) > sum(1 for x in mu if x >= j):
                return False
    return True


def _abelian_candidates(aun_factors, cap: int):
    """Candidate kernels admitting A_un as a subgroup, ordered by (order, type)."""
    base = [d for d in aun_factors if d > 1]
    for order in range(1, cap + 1):
        for fac in sorted(set(_abelian_types(order))):
            if _admits_embedding(base, fac):
                yield fac


def _try_close(source: FiniteGroup, target: FiniteGroup,
               img: np.ndarray, g: int, y: int) -> np.ndarray | None:
    """Extend a partial homomorphism by g -> y and close under products."""
    img = img.copy()
    img[g] = y
    changed = True
    while changed:
        changed = False
        k = np.flatnonzero(img >= 0)
        z = source.table[np.ix_(k, k)].ravel()
        w = target.table[np.ix_(img[k], img[k])].ravel()
        have = img[z]
        if ((have >= 0) & (have != w)).any():
            return None
        new = have < 0
        if new.any():
            # clashing double-writes surface as conflicts on the next sweep
            img[z[new]] = w[new]
            changed = True
    return img


def _constrained_hom(source: FiniteGroup, target: FiniteGroup,
                     source_label, target_label, require_surjective: bool = False,
                     accept=None, deadline=NO_DEADLINE) -> np.ndarray | None:
    """First homomorphism source -> target matching labels, by backtracking.

    Labels live in a common index set; phi must satisfy
    target_label[phi(x)] == source_label[x] for every x.
    """
    sl = np.asarray(source_label, dtype=np.int64)
    tl = np.asarray(target_label, dtype=np.int64)
    gens = _generating_sequence(source)
    fibers = [np.flatnonzero(tl == sl[g]) for g in gens]
    if any(f.size == 0 for f in fibers):
        return None
    init = np.full(source.order, -1, dtype=np.int64)
    init[0] = 0

    def rec(img: np.ndarray, i: int) -> np.ndarray | None:
        deadline.check()
        if i == len(gens):
            if (img < 0).any():
                return None
            if (tl[img] != sl).any():
                return None
            if require_surjective and np.unique(img).size != target.order:
                return None
            if accept is not None and not accept(img):
                return None
            return img
        if img[gens[i]] >= 0:
            return rec(img, i + 1)
        for y in fibers[i]:
            nxt = _try_close(source, target, img, gens[i], int(y))
            if nxt is not None:
                got = rec(nxt, i + 1)
                if got is not None:
                    return got
        return None

    return rec(init, 0)


@dataclass
class P3Report:
    """Outcome of the search for a cover of G descending the commutator map."""

    found: bool
    kernel: FiniteAbelian | None
    class_coords: tuple[int, ...] | None
    extension: CentralExtension | None
    bracket: StableBracket | None
    tried: int
    exhausted: bool


def verify_p3(group: FiniteGroup, t: TrueCommutatorResult, slack: int = 4,
              deadline=NO_DEADLINE,
              max_order: int = MAX_COHOMOLOGY_ORDER) -> P3Report:
    """Search covers of G whose commutator sections descend onto the cover.

    Kernels B range over abelian groups containing A_un, |B| up to
    |multiplier| * slack; for each covering class of G by B, the commutator
    sections of the restriction to [G,G] must generate a subgroup mapping
    onto the cover over the base, and the descended set-map must pass the
    stable-bracket axioms.  Exhaustion is reported, not raised.
    """
    if t.cover is None:
        raise AxiomFailure("cover absent: construction requires a splitting choice")
    sub, mem = t.base.as_group()
    cover_total = t.cover.total
    cover_proj = np.asarray(t.cover.projection.images, dtype=np.int64)
    delta = GroupHom(cover_total, group, mem[cover_proj], check=False)
    cap = schur_multiplier(group, max_order=max_order).order * slack
    tried = 0
    for fac in _abelian_candidates(list(t.aun.invariant_factors), cap):
        b = FiniteAbelian(fac)
        if b.order * group.order > MAX_ORDER:
            continue
        h2 = second_cohomology(group, b, max_order=max_order)
        for coords in itertools.product(*(range(d) for d in h2.factor_orders)):
            deadline.check()
            tried += 1
            e = extension_from_cocycle(h2.from_coords(coords))
            full, lift = restriction_of_extension(e, t.base)
            cm = subgroup_generated(full.total, [int(x) for x in np.unique(lift)])
            cg, cmem = cm.as_group()
            if cg.order % cover_total.order:
                continue
            pc = np.asarray(full.projection.images, dtype=np.int64)[cmem]
            phi = _constrained_hom(cg, cover_total, pc, cover_proj,
                                   require_surjective=True, deadline=deadline)
            if phi is None:
                continue
            back = np.full(full.total.order, -1, dtype=np.int64)
            back[cmem] = np.arange(cg.order, dtype=np.int64)
            try:
                sb = stable_from_lift(delta, phi[back[lift]])
            except AxiomFailure:
                continue
            return P3Report(True, b, tuple(int(c) for c in coords), e, sb,
                            tried, False)
    return P3Report(False, None, None, None, None, tried, True)


# -- the stacky abelianization --------------------------------------------------


@dataclass
class StackyAbelianization:
    """Quotient groupoid [G / cover] with its strictly commutative bracket."""

    groupoid: QuotientGroupoid
    bracket: StableBracket
    pi0: FiniteAbelian
    pi1: FiniteAbelian
    truecomm: TrueCommutatorResult = field(repr=False, default=None)
    p3: P3Report = field(repr=False, default=None)


def stacky_abelianization(group: FiniteGroup, slack: int = 4, deadline=NO_DEADLINE,
                          max_order: int = MAX_COHOMOLOGY_ORDER) -> StackyAbelianization:
    """Present [G / cover] with pi0 = G^ab, pi1 = A_un and a Picard bracket."""
    t = true_commutator(group, max_order=max_order)
    if t.cover is None:
        raise AxiomFailure(
            "construction requires a splitting choice: "
            "derived subgroup not perfect and aun nontrivial"
        )
    p3 = verify_p3(group, t, slack=slack, deadline=deadline, max_order=max_order)
    if not p3.found:
        raise AxiomFailure("no commutator lift found: search exhausted")
    qg = quotient_groupoid(p3.bracket.parent)
    ab = abelianization(group)
    pi0, _coords = abelian_structure(qg.pi0)
    if list(pi0.invariant_factors) != list(ab.group.invariant_factors):
        raise AxiomFailure("pi0 does not match the abelianization")
    if list(qg.pi1.invariant_factors) != list(t.aun.invariant_factors):
        raise AxiomFailure("pi1 does not match aun")
    return StackyAbelianization(qg, p3.bracket, pi0, qg.pi1, t, p3)


# -- universal factorization ----------------------------------------------------


@dataclass
class FactorizationResult:
    """Factorization of a map into a Picard presentation through [G / cover]."""

    first_iso: FirstIsoResult
    stacky: StackyAbelianization
    kernel_image: Subgroup
    cover_to_kernel: np.ndarray  # morphism images cover-total -> K
    cover_to_fiber: np.ndarray   # psi: cover-total -> target fiber group


def universal_factorization(f: GroupHom, target: StableBracket,
                            stacky: StackyAbelianization | None = None,
                            deadline=NO_DEADLINE,
                            max_order: int = MAX_ORDER) -> FactorizationResult:
    """Factor f through the stacky abelianization of its source.

    The kernel crossed module K of f must land over a subgroup containing
    [G,G]; the cover then maps into K by an equivariant fiber lift, giving a
    functor [G / cover] -> [G / K] whose composite with the kernel's
    factorization functor agrees with f on objects.
    """
    rep = check_strictly_stable(target)
    if not rep.ok:
        raise AxiomFailure("target bracket fails the stability axioms", report=rep)
    g = f.source
    st = stacky if stacky is not None else stacky_abelianization(g)
    res = first_iso(f, target.parent, max_order=max_order)
    kmod = res.crossed
    im = kmod.delta.image()
    if not np.all(im.mask[st.truecomm.base.members]):
        raise AxiomFailure(
            "inconsistency: kernel image does not contain the derived subgroup"
        )
    cover_delta = st.bracket.parent.delta
    cover_total = cover_delta.source
    dcov = np.asarray(cover_delta.images, dtype=np.int64)
    ft = np.asarray(f.images, dtype=np.int64)
    dt = np.asarray(target.parent.delta.images, dtype=np.int64)
    c_act = st.bracket.parent.action
    t_act = target.parent.action

    def equivariant(psi: np.ndarray) -> bool:
        return np.array_equal(psi[c_act], t_act[ft[:, None], psi[None, :]])

    psi = _constrained_hom(cover_total, target.parent.H, ft[dcov], dt,
                           require_surjective=False, accept=equivariant,
                           deadline=deadline)
    if psi is None:
        raise AxiomFailure("inconsistency: no equivariant fiber lift of the cover")
    pairs = {(int(x), int(h)): i for i, (x, h) in enumerate(res.elements)}
    a = np.array(
        [pairs[(int(dcov[c]), int(psi[c]))] for c in range(cover_total.order)],
        dtype=np.int64,
    )
    GroupHom(cover_total, kmod.H, a)  # raises if not a homomorphism
    if not np.array_equal(kmod.delta.images[a], dcov):
        raise AxiomFailure("fiber lift does not commute with the presentations")
    if not np.array_equal(a[c_act], kmod.action[:, a]):
        raise AxiomFailure("fiber lift is not action-equivariant")
    if not np.array_equal(res.elements[a][:, 1], psi):
        raise AxiomFailure("composed functor disagrees with the map on arrows")
    return FactorizationResult(res, st, im, a, psi)
