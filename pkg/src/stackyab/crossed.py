"""Crossed modules, stable commutator brackets, and quotient groupoids.

A crossed module is a homomorphism delta: H -> G with a right G-action on H
by automorphisms satisfying the two Peiffer identities; a stable bracket is
a lift {-,-}: G x G -> H of the commutator map subject to eight identities.
Checks return per-axiom reports carrying the lexicographically first
counterexample instead of raising, so failures stay inspectable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MAX_ORDER, AxiomFailure, CapExceeded
from .groups import (
    FiniteAbelian,
    FiniteGroup,
    GroupHom,
    Subgroup,
    abelian_structure,
    commutator_subgroup,
    identity_hom,
    inclusion_hom,
    quotient,
    trivial,
    trivial_hom,
)
from .cohomology import CentralExtension

__all__ = [
    "AxiomCheck",
    "CheckReport",
    "CrossedModule",
    "StableBracket",
    "QuotientGroupoid",
    "FirstIsoResult",
    "RestrictedExtension",
    "check_crossed_module",
    "check_strictly_stable",
    "stable_from_lift",
    "restriction_of_extension",
    "quotient_groupoid",
    "first_iso",
    "conjugation_module",
    "inclusion_module",
    "trivial_module",
]

_CHUNK = 32  # leading-axis block size for the cubic axiom scans


@dataclass
class AxiomCheck:
    """Verdict for one axiom, with the first counterexample on failure."""

    name: str
    ok: bool
    witness: tuple | None = None

    def __str__(self) -> str:
        return f"{self.name}: {'ok' if self.ok else f'FAIL at {self.witness}'}"


@dataclass
class CheckReport:
    """Ordered axiom verdicts; ok only when every check passed."""

    checks: list[AxiomCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.ok]

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.checks)


def _first_bad(lhs, rhs, offset: int | None = None) -> tuple | None:
    """Lexicographically first index where the arrays differ, or None."""
    bad = np.argwhere(lhs != rhs)
    if bad.size == 0:
        return None
    out = [int(v) for v in bad[0]]
    if offset is not None:
        out[0] += offset
    return tuple(out)


@dataclass(eq=False)
class CrossedModule:
    """delta: H -> G plus a right G-action table, action[g, h] = h^g."""

    H: FiniteGroup
    G: FiniteGroup
    delta: GroupHom
    action: np.ndarray

    def __post_init__(self) -> None:
        self.action = np.ascontiguousarray(np.asarray(self.action, dtype=np.int64))
        if self.delta.source is not self.H or self.delta.target is not self.G:
            raise ValueError("delta must be a homomorphism from H to G")
        if self.action.shape != (self.G.order, self.H.order):
            raise ValueError("action table must be |G| x |H|")
        if self.action.size and (self.action.min() < 0 or self.action.max() >= self.H.order):
            raise ValueError("action entry out of range")

    def act(self, h: int, g: int) -> int:
        """h^g."""
        return int(self.action[g, h])

    def __repr__(self) -> str:
        return f"CrossedModule(|H|={self.H.order}, |G|={self.G.order})"


@dataclass(eq=False)
class StableBracket:
    """A crossed module with a lift bracket: G x G -> H of the commutator map."""

    parent: CrossedModule
    bracket: np.ndarray

    def __post_init__(self) -> None:
        self.bracket = np.ascontiguousarray(np.asarray(self.bracket, dtype=np.int64))
        ng, nh = self.parent.G.order, self.parent.H.order
        if self.bracket.shape != (ng, ng):
            raise ValueError("bracket table must be |G| x |G|")
        if self.bracket.min() < 0 or self.bracket.max() >= nh:
            raise ValueError("bracket entry out of range")

    def value(self, g1: int, g2: int) -> int:
        """{g1, g2}."""
        return int(self.bracket[g1, g2])

    def __repr__(self) -> str:
        return f"StableBracket(|H|={self.parent.H.order}, |G|={self.parent.G.order})"


def _commutator_table(g: FiniteGroup) -> np.ndarray:
    """table[x, y] = x^-1 y^-1 x y."""
    t = g.table
    n = g.order
    inner = t[g.inv[:, None], g.inv[None, :]]
    inner = t[inner, np.arange(n)[:, None]]
    return t[inner, np.arange(n)[None, :]]


def check_crossed_module(xm: CrossedModule) -> CheckReport:
    """Per-axiom verdicts with lexicographically first counterexamples."""
    g, h, act = xm.G, xm.H, xm.action
    tg, th = g.table, h.table
    ng, nh = g.order, h.order
    delta = xm.delta.images
    checks: list[AxiomCheck] = []

    row_ok = (np.sort(act, axis=1) == np.arange(nh)[None, :]).all(axis=1)
    ok = bool(row_ok.all())
    checks.append(AxiomCheck("action-permutation", ok,
                             None if ok else (int(np.argmin(row_ok)),)))

    w = _first_bad(act[0], np.arange(nh))
    checks.append(AxiomCheck("action-identity", w is None, w))

    # (h^g)^{g'} = h^{g g'}, scanned in g-blocks to bound memory
    w = None
    for lo in range(0, ng, _CHUNK):
        hi = min(lo + _CHUNK, ng)
        lhs = act[tg[lo:hi]]                      # [g, g', h] = h^{g g'}
        rhs = act[:, act[lo:hi]].transpose(1, 0, 2)
        w = _first_bad(lhs, rhs, offset=lo)
        if w is not None:
            break
    checks.append(AxiomCheck("action-composition", w is None, w))

    # (h1 h2)^g = h1^g h2^g
    w = None
    for lo in range(0, ng, _CHUNK):
        hi = min(lo + _CHUNK, ng)
        blk = act[lo:hi]
        lhs = blk[:, th]                          # [g, h1, h2] = (h1 h2)^g
        rhs = th[blk[:, :, None], blk[:, None, :]]
        w = _first_bad(lhs, rhs, offset=lo)
        if w is not None:
            break
    checks.append(AxiomCheck("action-automorphism", w is None, w))

    # h2^{delta(h1)} = h1^-1 h2 h1
    lhs = act[delta]
    inner = th[h.inv][:, :]
    rhs = th[inner, np.arange(nh)[:, None]]
    w = _first_bad(lhs, rhs)
    checks.append(AxiomCheck("peiffer-1", w is None, w))

    # delta(h^g) = g^-1 delta(h) g
    lhs = delta[act]
    inner = tg[g.inv][:, delta]
    rhs = tg[inner, np.arange(ng)[:, None]]
    w = _first_bad(lhs, rhs)
    checks.append(AxiomCheck("peiffer-2", w is None, w))

    return CheckReport(checks)


def check_strictly_stable(sb: StableBracket) -> CheckReport:
    """Parent axioms followed by bracket axioms (1)-(8), all always reported."""
    xm = sb.parent
    g, h, act, b = xm.G, xm.H, xm.action, sb.bracket
    tg, th = g.table, h.table
    ng, nh = g.order, h.order
    delta = xm.delta.images
    checks = list(check_crossed_module(xm).checks)

    gcomm = _commutator_table(g)
    w = _first_bad(delta[b], gcomm)
    checks.append(AxiomCheck("bracket-1-delta-commutator", w is None, w))

    hcomm = _commutator_table(h)
    w = _first_bad(b[delta[:, None], delta[None, :]], hcomm)
    checks.append(AxiomCheck("bracket-2-restriction", w is None, w))

    # {delta h, g} = h^-1 (h^g)
    lhs = b[delta, :]
    rhs = th[h.inv[:, None], act.T]
    w = _first_bad(lhs, rhs)
    checks.append(AxiomCheck("bracket-3-inner-left", w is None, w))

    # {g, delta h} = (h^g)^-1 h
    lhs = b[:, delta]
    rhs = th[h.inv[act], np.arange(nh)[None, :]]
    w = _first_bad(lhs, rhs)
    checks.append(AxiomCheck("bracket-4-inner-right", w is None, w))

    # {g0, g1 g2} = {g0, g2} {g0, g1}^{g2}
    w = None
    for lo in range(0, ng, _CHUNK):
        hi = min(lo + _CHUNK, ng)
        blk = b[lo:hi]
        lhs = blk[:, tg]                          # [g0, g1, g2]
        twisted = act[np.arange(ng)[None, None, :], blk[:, :, None]]
        rhs = th[blk[:, None, :], twisted]
        w = _first_bad(lhs, rhs, offset=lo)
        if w is not None:
            break
    checks.append(AxiomCheck("bracket-5-right-expansion", w is None, w))

    # {g0 g1, g2} = {g0, g2}^{g1} {g1, g2}
    w = None
    for lo in range(0, ng, _CHUNK):
        hi = min(lo + _CHUNK, ng)
        blk = b[lo:hi]
        lhs = b[tg[lo:hi]]                        # [g0, g1, g2]
        twisted = act[np.arange(ng)[None, :, None], blk[:, None, :]]
        rhs = th[twisted, b[None, :, :]]
        w = _first_bad(lhs, rhs, offset=lo)
        if w is not None:
            break
    checks.append(AxiomCheck("bracket-6-left-expansion", w is None, w))

    w = _first_bad(th[b, b.T], np.zeros((ng, ng), dtype=np.int64))
    checks.append(AxiomCheck("bracket-7-antisymmetry", w is None, w))

    w = _first_bad(np.diagonal(b), np.zeros(ng, dtype=np.int64))
    checks.append(AxiomCheck("bracket-8-alternating", w is None, w))

    return CheckReport(checks)


def stable_from_lift(delta: GroupHom, lift) -> StableBracket:
    """Stable bracket from a commutator lift; every axiom verified, not assumed.

    The action is h^g := h * lift(delta(h), g).  Requires ker(delta) central
    in H, delta(lift(g1, g2)) = [g1, g2], and lift(1, 1) = 1.
    """
    h, g = delta.source, delta.target
    th = h.table
    lift = np.ascontiguousarray(np.asarray(lift, dtype=np.int64))
    if lift.shape != (g.order, g.order):
        raise ValueError("lift table must be |G| x |G|")
    if lift.min() < 0 or lift.max() >= h.order:
        raise ValueError("lift entry out of range")
    if lift[0, 0] != 0:
        raise AxiomFailure("lift(1, 1) must be the identity of H")
    kerm = delta.kernel().members
    if not np.array_equal(th[kerm, :], th[:, kerm].T):
        raise AxiomFailure("kernel of delta is not central in H")
    w = _first_bad(delta.images[lift], _commutator_table(g))
    if w is not None:
        raise AxiomFailure(f"delta(lift) differs from the commutator map at {w}")

    rows = lift[delta.images]                     # [h, g] = lift(delta(h), g)
    action = th[np.arange(h.order)[None, :], rows.T]
    xm = CrossedModule(h, g, delta, action)
    report = check_crossed_module(xm)
    if not report.ok:
        raise AxiomFailure(f"lift does not induce a crossed module: "
                           f"{report.failures()[0]}", report=report)
    sb = StableBracket(xm, lift)
    report = check_strictly_stable(sb)
    if not report.ok:
        raise AxiomFailure(f"lift is not strictly stable: "
                           f"{report.failures()[0]}", report=report)
    return sb


@dataclass(eq=False)
class RestrictedExtension:
    """Preimage extension over a subgroup, plus the commutator lift if S = [G,G].

    total_members maps the local index of full.total to the index in the
    original total group; base_members does the same for full's base.
    Unpacks as (full, lift) for the common call shape.
    """

    full: CentralExtension
    lift: np.ndarray | None
    total_members: np.ndarray
    base_members: np.ndarray

    def __iter__(self):
        yield self.full
        yield self.lift


def _minimal_section(projection: GroupHom) -> np.ndarray:
    """Smallest preimage index for every base element."""
    sec = np.full(projection.target.order, projection.source.order, dtype=np.int64)
    np.minimum.at(sec, projection.images, np.arange(projection.source.order))
    if sec.max() >= projection.source.order:
        raise ValueError("projection is not surjective")
    return sec


def restriction_of_extension(e: CentralExtension, s: Subgroup) -> RestrictedExtension:
    """Preimage of a subgroup inside a central extension.

    When s is the commutator subgroup of the base, also returns the canonical
    commutator lift (g, g') -> [s(g), s(g')] over all base pairs, valued in
    local indices of the preimage; the kernel being central makes it
    independent of the chosen section.
    """
    base = e.projection.target
    if s.parent is not base:
        raise ValueError("subgroup belongs to a different group")
    proj = e.projection.images
    keep = np.flatnonzero(s.mask[proj])
    sub = Subgroup(e.total, keep)
    total_sub, mem = sub.as_group()
    s_grp, s_mem = s.as_group()
    s_lut = np.full(base.order, -1, dtype=np.int64)
    s_lut[s_mem] = np.arange(s.order)
    t_lut = np.full(e.total.order, -1, dtype=np.int64)
    t_lut[mem] = np.arange(len(mem))
    projection = GroupHom(total_sub, s_grp, s_lut[proj[mem]], check=False)
    full = CentralExtension(total_sub, projection, e.coefficients,
                            t_lut[np.asarray(e.kernel_embedding, dtype=np.int64)])
    full.validate()

    lift = None
    if np.array_equal(s.members, commutator_subgroup(base).members):
        sec = _minimal_section(e.projection)
        tt, tinv = e.total.table, e.total.inv
        inner = tt[tinv[sec][:, None], tinv[sec][None, :]]
        inner = tt[inner, sec[:, None]]
        lift = t_lut[tt[inner, sec[None, :]]]
        if lift.min() < 0:
            raise AxiomFailure("commutator of section values left the preimage")
    return RestrictedExtension(full, lift, mem, s_mem)


@dataclass(eq=False)
class QuotientGroupoid:
    """Groupoid of a crossed module: objects G, arrows g -> g*delta(h)."""

    presentation: CrossedModule
    pi0: FiniteGroup
    pi1: FiniteAbelian
    pi0_projection: GroupHom
    pi1_members: np.ndarray

    def arrows(self, g: int, g2: int) -> np.ndarray:
        """All h with g * delta(h) = g2, ascending."""
        targets = self.presentation.G.table[g, self.presentation.delta.images]
        return np.flatnonzero(targets == g2)

    def arrow_target(self, g: int, h: int) -> int:
        return self.presentation.G.mul(g, self.presentation.delta(h))

    def compose(self, first: tuple[int, int], second: tuple[int, int]) -> tuple[int, int]:
        """(g, h): g -> g*delta(h) followed by (g*delta(h), h')."""
        g, h = first
        g2, h2 = second
        if self.arrow_target(g, h) != g2:
            raise ValueError("arrows are not composable")
        return g, self.presentation.H.mul(h, h2)

    def tensor(self, left: tuple[int, int], right: tuple[int, int]) -> tuple[int, int]:
        """(g, h) tensor (g', h') = (g g', h^{g'} h')."""
        g, h = left
        g2, h2 = right
        xm = self.presentation
        return xm.G.mul(g, g2), xm.H.mul(xm.act(h, g2), h2)

    def connected(self, g: int, g2: int) -> bool:
        return self.pi0_projection(g) == self.pi0_projection(g2)

    def __repr__(self) -> str:
        return (f"QuotientGroupoid(pi0 order {self.pi0.order}, "
                f"pi1 {self.pi1.invariant_factors})")


def quotient_groupoid(xm: CrossedModule) -> QuotientGroupoid:
    """pi0 = coker(delta), pi1 = ker(delta); raises on an invalid module."""
    report = check_crossed_module(xm)
    if not report.ok:
        raise AxiomFailure(f"invalid crossed module: {report.failures()[0]}",
                           report=report)
    qr = quotient(xm.G, xm.delta.image())
    ker = xm.delta.kernel()
    th = xm.H.table
    if not np.array_equal(th[ker.members, :], th[:, ker.members].T):
        raise AxiomFailure("kernel of delta is not central in H")
    ker_grp, _ = ker.as_group()
    pi1, _ = abelian_structure(ker_grp)
    return QuotientGroupoid(presentation=xm, pi0=qr.group, pi1=pi1,
                            pi0_projection=qr.projection, pi1_members=ker.members)


@dataclass(eq=False)
class FirstIsoResult:
    """Kernel crossed module of a map into a quotient groupoid, with functor data.

    elements[k] = (x, h) with delta(h) = f(x); object_map sends objects by f
    and arrow_map sends the arrow k to the arrow labeled elements[k][1].
    """

    crossed: CrossedModule
    elements: np.ndarray
    object_map: GroupHom
    arrow_map: np.ndarray

    def __iter__(self):
        yield self.crossed
        yield self


def first_iso(f: GroupHom, target: CrossedModule,
              max_order: int = MAX_ORDER) -> FirstIsoResult:
    """Fiber product crossed module K = {(x, h) : delta(h) = f(x)} over f.source.

    Multiplication is (x, h)(y, h') = (xy, h h') (tensor of unit-sourced
    arrows) and gamma acts by (x, h)^gamma = (gamma^-1 x gamma, h^{f(gamma)}).
    The induced functor is fully faithful onto the target quotient groupoid.
    """
    if f.target is not target.G:
        raise ValueError("f must land in the base of the target module")
    report = check_crossed_module(target)
    if not report.ok:
        raise AxiomFailure(f"invalid target module: {report.failures()[0]}",
                           report=report)
    gam, h = f.source, target.H
    delta = target.delta.images
    fim = f.images

    pairs = [(x, hh) for x in range(gam.order)
             for hh in np.flatnonzero(delta == fim[x]).tolist()]
    nk = len(pairs)
    if nk > max_order:
        raise CapExceeded(f"fiber product order {nk} exceeds cap {max_order}")
    elements = np.array(pairs, dtype=np.int64).reshape(nk, 2)
    xs, hs = elements[:, 0], elements[:, 1]
    lut = np.full((gam.order, h.order), -1, dtype=np.int64)
    lut[xs, hs] = np.arange(nk)

    table = lut[gam.table[xs[:, None], xs[None, :]], h.table[hs[:, None], hs[None, :]]]
    if table.min() < 0:
        raise AxiomFailure("fiber product is not closed under multiplication")
    labels = [f"({gam.label(int(x))},{h.label(int(hh))})" for x, hh in pairs]
    k_grp = FiniteGroup(table.astype(np.int32), labels=labels,
                        name=f"fiber({gam.name or 'G'})")
    delta_k = GroupHom(k_grp, gam, xs, check=False)

    inner = gam.table[gam.inv][:, xs]
    conj = gam.table[inner, np.arange(gam.order)[:, None]]
    twisted = target.action[fim][:, hs]
    act_k = lut[conj, twisted]
    if act_k.min() < 0:
        raise AxiomFailure("fiber product is not closed under the action")
    crossed = CrossedModule(k_grp, gam, delta_k, act_k)
    report = check_crossed_module(crossed)
    if not report.ok:
        raise AxiomFailure(f"fiber product fails the axioms: {report.failures()[0]}",
                           report=report)

    result = FirstIsoResult(crossed=crossed, elements=elements,
                            object_map=f, arrow_map=hs.copy())
    _assert_fully_faithful(result, target)
    return result


def _assert_fully_faithful(res: FirstIsoResult, target: CrossedModule) -> None:
    """Arrow map must biject every hom-set of [G/K] onto its image hom-set."""
    f = res.object_map
    gam = f.source
    delta = target.delta.images
    xs, hs = res.elements[:, 0], res.elements[:, 1]
    by_first: dict[int, list[int]] = {}
    for k in range(len(xs)):
        by_first.setdefault(int(xs[k]), []).append(k)
    # hom-set x -> x2 in the source consists of the k with xs[k] = x^-1 x2
    ok_y = np.zeros(gam.order, dtype=bool)
    for y in range(gam.order):
        sent = sorted(int(hs[k]) for k in by_first.get(y, []))
        want = np.flatnonzero(delta == f.images[y]).tolist()
        ok_y[y] = sent == want and len(set(sent)) == len(sent)
    for x in range(gam.order):
        for x2 in range(gam.order):
            y = gam.mul(gam.inverse(x), x2)
            if not ok_y[y]:
                raise AxiomFailure(
                    f"functor is not fully faithful on hom-set ({x}, {x2})")


def conjugation_module(g: FiniteGroup) -> CrossedModule:
    """Identity map G -> G with the conjugation action."""
    inner = g.table[g.inv][:, :]
    action = g.table[inner, np.arange(g.order)[:, None]]
    return CrossedModule(g, g, identity_hom(g), action)


def inclusion_module(s: Subgroup) -> CrossedModule:
    """Normal subgroup inclusion with conjugation action of the parent."""
    if not s.is_normal():
        raise ValueError("conjugation only preserves a normal subgroup")
    parent = s.parent
    s_grp, mem = s.as_group()
    lut = np.full(parent.order, -1, dtype=np.int64)
    lut[mem] = np.arange(s.order)
    inner = parent.table[parent.inv][:, mem]
    action = lut[parent.table[inner, np.arange(parent.order)[:, None]]]
    return CrossedModule(s_grp, parent, inclusion_hom(s), action)


def trivial_module(g: FiniteGroup) -> CrossedModule:
    """Trivial group mapped into G; every object of [G/1] is rigid."""
    one = trivial()
    action = np.zeros((g.order, 1), dtype=np.int64)
    return CrossedModule(one, g, trivial_hom(one, g), action)
