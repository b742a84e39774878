import numpy as np
import pytest

from stackyab import groups
from stackyab.cohomology import (
    Cocycle2,
    extension_from_cocycle,
    restriction_map,
    schur_multiplier,
    second_cohomology,
)
from stackyab.crossed import check_strictly_stable, StableBracket, trivial_module
from stackyab.errors import AxiomFailure, Deadline, DeadlineExceeded
from stackyab.groups import FiniteAbelian, GroupHom
from stackyab.truecomm import (
    TrueCommutatorResult,
    aun,
    stacky_abelianization,
    true_commutator,
    universal_factorization,
    verify_p1,
    verify_p3,
)

C6 = groups.cyclic(6)
C2xC4 = groups.direct_product(groups.cyclic(2), groups.cyclic(4))
S3 = groups.symmetric(3)
S4 = groups.symmetric(4)
A4 = groups.alternating(4)
A5 = groups.alternating(5)
D4 = groups.dihedral(4)
Q8 = groups.quaternion8()
SL23 = groups.sl2(3)


def gl2_3():
    """All invertible 2x2 matrices over the 3-element field, as a table group."""
    mats = []
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    if (a * d - b * c) % 3:
                        mats.append((a, b, c, d))
    index = {m: i for i, m in enumerate(mats)}
    n = len(mats)
    table = np.zeros((n, n), dtype=np.int64)
    for i, (a, b, c, d) in enumerate(mats):
        for j, (e, f, g, h) in enumerate(mats):
            prod = ((a * e + b * g) % 3, (a * f + b * h) % 3,
                    (c * e + d * g) % 3, (c * f + d * h) % 3)
            table[i, j] = index[prod]
    one = index[(1, 0, 0, 1)]
    order = np.argsort(np.arange(n) != one, kind="stable")
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    return groups.from_table(inv[table[np.ix_(order, order)]], name="gl(2,3)")


# -- aun ----------------------------------------------------------------------


def test_aun_trivial_for_abelian_groups():
    for g in (C6, C2xC4):
        a = aun(g)
        assert a.structure.invariant_factors == []
        assert a.witnesses == []
        assert a.base.members.size == 1


def test_aun_trivial_when_derived_multiplier_vanishes():
    # derived subgroups C3, C2, Q8 all have trivial multiplier
    for g in (S3, Q8, D4, SL23):
        a = aun(g)
        assert a.structure.invariant_factors == []
        sub, _ = a.base.as_group()
        assert schur_multiplier(sub).invariant_factors == []


def test_aun_a5_restriction_is_identity():
    a = aun(A5)
    assert a.structure.invariant_factors == [2]
    assert a.base.members.size == 60
    # G = [G,G]: the image is the whole dual of the multiplier
    assert a.structure.order == schur_multiplier(A5).order
    assert len(a.witnesses) == 1
    w = a.witnesses[0]
    assert w.coefficients.invariant_factors == [4]
    sub, _ = a.base.as_group()
    assert second_cohomology(sub, [4]).class_order(w) == 2


def test_aun_order_divides_derived_multiplier():
    for g in (S3, S4, A4, A5, Q8, D4, SL23):
        a = aun(g)
        sub, _ = a.base.as_group()
        m = schur_multiplier(sub).order
        assert m % a.structure.order == 0


def test_aun_s4_matches_matrix_group_census():
    # GL(2,3) is a central 2-fold cover of S4; its restriction over the
    # alternating subgroup has a unique involution, hence cannot split,
    # so the restriction image of covering classes is nontrivial.
    gl = gl2_3()
    zc = groups.center(gl)
    assert zc.members.size == 2
    q = groups.quotient(gl, zc)
    assert groups.find_isomorphism(q.group, S4) is not None
    derived = groups.commutator_subgroup(q.group)
    assert derived.members.size == 12
    pre = np.flatnonzero(derived.mask[q.projection.images])
    assert pre.size == 24
    orders = gl.element_orders()[pre]
    assert int((orders == 2).sum()) == 1
    a = aun(S4)
    assert a.structure.invariant_factors == [2]
    # cross-check along an independent code path: mod-2 class restriction
    rm = restriction_map(second_cohomology(S4, [2]), groups.commutator_subgroup(S4))
    assert rm.matrix.any()


def test_aun_a4_matches_quaternion_census():
    # SL(2,3) covers A4; the preimage of the Klein subgroup is quaternion
    # with a unique involution, so the restriction image is again [2].
    zc = groups.center(SL23)
    q = groups.quotient(SL23, zc)
    assert groups.find_isomorphism(q.group, A4) is not None
    derived = groups.commutator_subgroup(q.group)
    assert derived.members.size == 4
    pre = np.flatnonzero(derived.mask[q.projection.images])
    orders = SL23.element_orders()[pre]
    assert pre.size == 8 and int((orders == 2).sum()) == 1
    a = aun(A4)
    assert a.structure.invariant_factors == [2]
    w = a.witnesses[0]
    assert w.coefficients.invariant_factors == [4]
    sub, _ = a.base.as_group()
    assert second_cohomology(sub, [4]).class_order(w) == 2


def test_aun_s4_witness_class_has_order_two_at_parent_modulus():
    a = aun(S4)
    assert a.prime_orders == [2]
    w = a.witnesses[0]
    # parent modulus: the 2-part of |S4| is 8
    assert w.coefficients.invariant_factors == [8]
    sub, _ = a.base.as_group()
    assert second_cohomology(sub, [8]).class_order(w) == 2


# -- true_commutator ----------------------------------------------------------


def test_cover_of_abelian_group_is_trivial():
    t = true_commutator(C6)
    assert t.cover is not None and t.cover.total.order == 1
    assert not t.needs_splitting_choice
    assert t.aun.invariant_factors == []


def test_cover_with_trivial_aun_is_the_derived_subgroup():
    for g, dorder in ((Q8, 2), (S3, 3), (SL23, 8)):
        t = true_commutator(g)
        sub, _ = t.base.as_group()
        assert t.cover.total.order == dorder
        assert np.array_equal(t.cover.total.table, sub.table)
        assert np.array_equal(t.cover.projection.images, np.arange(dorder))


def test_cover_a5_is_binary_icosahedral():
    t = true_commutator(A5)
    assert t.cover is not None
    assert t.cover.total.order == 120
    assert groups.is_perfect(t.cover.total)
    assert t.cover.coefficients.invariant_factors == [2]
    assert groups.find_isomorphism(t.cover.total, groups.sl2(5)) is not None


def test_cover_absent_without_perfect_derived_subgroup():
    for g in (A4, S4):
        t = true_commutator(g)
        assert t.cover is None
        assert t.needs_splitting_choice
        assert t.aun.invariant_factors == [2]
        assert len(t.witness_classes) == 1
        with pytest.raises(AxiomFailure, match="splitting choice"):
            verify_p1(g, t, [[2]])
        with pytest.raises(AxiomFailure, match="splitting choice"):
            verify_p3(g, t)
        with pytest.raises(AxiomFailure, match="splitting choice"):
            stacky_abelianization(g)


def test_true_commutator_result_is_cached():
    assert true_commutator(S3) is true_commutator(S3)


@pytest.mark.slow
def test_cover_of_c2_x_a5_is_binary_icosahedral():
    g = groups.direct_product(groups.cyclic(2), A5)
    t = true_commutator(g)
    assert t.aun.invariant_factors == [2]
    assert t.cover.total.order == 120
    assert groups.find_isomorphism(t.cover.total, groups.sl2(5)) is not None
    st = stacky_abelianization(g)
    assert st.pi0.invariant_factors == [2]
    assert st.pi1.invariant_factors == [2]


@pytest.mark.slow
def test_cover_of_s5_is_binary_icosahedral():
    s5 = groups.symmetric(5)
    t = true_commutator(s5)
    assert t.aun.invariant_factors == [2]
    assert t.cover.total.order == 120
    assert groups.find_isomorphism(t.cover.total, groups.sl2(5)) is not None
    st = stacky_abelianization(s5)
    assert st.pi0.invariant_factors == [2]
    assert st.pi1.invariant_factors == [2]
    assert check_strictly_stable(st.bracket).ok


# -- P1 -----------------------------------------------------------------------


def test_p1_a5_covering_classes_die_on_cover():
    t = true_commutator(A5)
    rep = verify_p1(A5, t, [[2], [3], [4]])
    assert rep.ok
    # H^2(A5,-) has one basis class for [2] and [4], none for [3]
    assert rep.checked == 2
    assert rep.failures == []


def test_p1_s3_with_trivial_cover():
    t = true_commutator(S3)
    rep = verify_p1(S3, t, [[6]])
    assert rep.ok and rep.checked == 1
    # independent check: the class restriction matrix to [S3,S3] vanishes
    rm = restriction_map(second_cohomology(S3, [6]), t.base)
    assert not any(rm.apply(c) != (0,) * len(rm.target.factor_orders)
                   for c in np.eye(len(rm.source.factor_orders), dtype=np.int64))


def test_p1_flags_wrong_cover():
    t = true_commutator(A5)
    sub, _ = t.base.as_group()
    split = extension_from_cocycle(Cocycle2.zero(sub, FiniteAbelian([2])))
    fake = TrueCommutatorResult(A5, t.base, FiniteAbelian([2]), split,
                                t.witness_classes, False, t.aun_data)
    rep = verify_p1(A5, fake, [[2]])
    assert not rep.ok
    assert rep.failures == [((2,), (1,))]


# -- P3 -----------------------------------------------------------------------


def test_p3_abelian_lift_is_identity():
    t = true_commutator(C6)
    rep = verify_p3(C6, t)
    assert rep.found
    assert rep.kernel.invariant_factors == []
    assert not rep.bracket.bracket.any()


def test_p3_a5_found_inside_the_cover_itself():
    t = true_commutator(A5)
    rep = verify_p3(A5, t)
    assert rep.found
    assert rep.kernel.invariant_factors == [2]
    # the split class is skipped, the stem class is the second candidate
    assert rep.tried == 2
    assert rep.extension.total.order == 120
    assert groups.find_isomorphism(rep.extension.total, t.cover.total) is not None
    check = check_strictly_stable(rep.bracket)
    assert check.ok and len(check.checks) == 14


def test_p3_q8_bracket_is_commutator_projection():
    t = true_commutator(Q8)
    rep = verify_p3(Q8, t)
    assert rep.found
    delta = rep.bracket.parent.delta
    n = Q8.order
    x = np.arange(n)
    comm = Q8.table[Q8.table[Q8.table[Q8.inv[:, None], Q8.inv[None, :]],
                             x[:, None]], x[None, :]]
    assert np.array_equal(np.asarray(delta.images)[rep.bracket.bracket], comm)


def test_p3_deadline_cancels_search():
    t = true_commutator(A5)
    with pytest.raises(DeadlineExceeded):
        verify_p3(A5, t, deadline=Deadline(-1.0))


def test_p3_exhaustion_is_reported_not_raised():
    t = true_commutator(A5)
    sub, _ = t.base.as_group()
    split = extension_from_cocycle(Cocycle2.zero(sub, FiniteAbelian([2])))
    fake = TrueCommutatorResult(A5, t.base, FiniteAbelian([2]), split,
                                t.witness_classes, False, t.aun_data)
    rep = verify_p3(A5, fake)
    assert not rep.found
    assert rep.exhausted
    assert rep.tried > 0
    assert rep.bracket is None


# -- stacky abelianization ------------------------------------------------------


def test_stacky_abelian_groups_are_their_own_pi0():
    for g, inv in ((C6, [6]), (C2xC4, [2, 4])):
        st = stacky_abelianization(g)
        assert st.pi0.invariant_factors == inv
        assert st.pi1.invariant_factors == []
        assert not st.bracket.bracket.any()


def test_stacky_s3():
    st = stacky_abelianization(S3)
    assert st.pi0.invariant_factors == [2]
    assert st.pi1.invariant_factors == []
    assert check_strictly_stable(st.bracket).ok


def test_stacky_q8():
    st = stacky_abelianization(Q8)
    assert st.pi0.invariant_factors == [2, 2]
    assert st.pi1.invariant_factors == []
    assert check_strictly_stable(st.bracket).ok


def test_stacky_a5():
    st = stacky_abelianization(A5)
    assert st.pi0.invariant_factors == []
    assert st.pi1.invariant_factors == [2]
    check = check_strictly_stable(st.bracket)
    assert check.ok
    assert all(c.ok for c in check.checks)


def test_stacky_groupoid_hom_sets_are_pi1_torsors():
    st = stacky_abelianization(A5)
    qg = st.groupoid
    assert qg.pi0.order == 1
    s = int(st.truecomm.base.members[5])
    assert qg.arrows(0, s).size == st.pi1.order
    assert qg.arrows(0, 0).size == st.pi1.order


# -- universal factorization ----------------------------------------------------


def zero_bracket_over(base):
    """Discrete Picard presentation 1 -> base with the zero bracket."""
    mod = trivial_module(base)
    return StableBracket(mod, np.zeros((base.order, base.order), dtype=np.int64))


def test_factorization_of_abelianization_is_abelianization():
    ab = groups.abelianization(Q8)
    st = stacky_abelianization(Q8)
    fac = universal_factorization(ab.quotient.projection,
                                  zero_bracket_over(ab.quotient.group), st)
    assert fac.stacky is st
    k = fac.first_iso.crossed
    assert k.H.order == 2
    assert np.array_equal(fac.kernel_image.members, st.truecomm.base.members)
    assert not fac.cover_to_fiber.any()


def test_factorization_s3_sign_map():
    ab = groups.abelianization(S3)
    fac = universal_factorization(ab.quotient.projection,
                                  zero_bracket_over(ab.quotient.group))
    k = fac.first_iso.crossed
    assert k.H.order == 3
    assert sorted(int(x) for x in fac.kernel_image.members) == \
        sorted(int(x) for x in groups.commutator_subgroup(S3).members)
    # functor composition agrees with the sign map on objects
    assert np.array_equal(fac.first_iso.object_map.images,
                          ab.quotient.projection.images)


def test_factorization_a5_trivial_map_into_shifted_c2():
    one = groups.trivial()
    c2 = groups.cyclic(2)
    mod_delta = groups.trivial_hom(c2, one)
    xm_action = np.tile(np.arange(2, dtype=np.int64), (1, 1))
    from stackyab.crossed import CrossedModule
    xm = CrossedModule(c2, one, mod_delta, xm_action)
    target = StableBracket(xm, np.zeros((1, 1), dtype=np.int64))
    assert check_strictly_stable(target).ok
    st = stacky_abelianization(A5)
    fac = universal_factorization(groups.trivial_hom(A5, one), target, st)
    assert fac.first_iso.crossed.H.order == 120
    assert fac.stacky.pi1.invariant_factors == [2]
    # the cover is perfect, so its map into the fiber group is trivial
    assert not fac.cover_to_fiber.any()


def test_factorization_rejects_corrupted_target_bracket():
    from stackyab.crossed import CrossedModule
    c2 = groups.cyclic(2)
    v4 = groups.direct_product(c2, c2)
    act = np.tile(np.arange(2, dtype=np.int64), (4, 1))
    xm = CrossedModule(c2, v4, groups.trivial_hom(c2, v4), act)
    vals = np.zeros((4, 4), dtype=np.int64)
    vals[1, 2] = 1  # breaks antisymmetry
    with pytest.raises(AxiomFailure, match="stability"):
        universal_factorization(groups.trivial_hom(S3, v4), StableBracket(xm, vals),
                                stacky_abelianization(S3))


def test_factorization_reuses_provided_stacky():
    st = stacky_abelianization(S3)
    ab = groups.abelianization(S3)
    fac = universal_factorization(ab.quotient.projection,
                                  zero_bracket_over(ab.quotient.group), st)
    assert fac.stacky is st
