import itertools
import random

import numpy as np
import pytest

from stackyab.modsolve import (
    HowellBasis,
    kernel_mod,
    local_snf,
    quotient_mod,
    unit_inverse,
    valuations,
)


def _span(gens, q, n):
    # full closure of the generated subgroup of (Z/q)^n
    seen = {(0,) * n}
    frontier = [np.zeros(n, dtype=np.int64)]
    garr = [np.asarray(g, dtype=np.int64) % q for g in gens]
    while frontier:
        v = frontier.pop()
        for g in garr:
            w = tuple((v + g) % q)
            if w not in seen:
                seen.add(w)
                frontier.append(np.array(w, dtype=np.int64))
    return seen


def test_valuations_table():
    assert valuations([0, 1, 2, 3, 4, 6, 8], 2, 3).tolist() == [3, 0, 1, 0, 2, 1, 3]
    assert valuations([[9, 3], [1, 0]], 3, 2).tolist() == [[2, 1], [0, 2]]


def test_unit_inverse():
    for q in (2, 3, 4, 8, 9, 27):
        for u in range(1, q):
            if np.gcd(u, q) == 1:
                assert (u * unit_inverse(u, q)) % q == 1


def test_howell_completion_is_required():
    # over Z/4 the span of (2, 1) contains 2*(2,1) = (0, 2), which greedy
    # reduction only finds because the completion row is present
    b = HowellBasis(2, 2, 2)
    b.insert([2, 1])
    assert b.contains([0, 2])
    assert b.contains([2, 1])
    assert not b.contains([0, 1])
    assert not b.contains([1, 0])


@pytest.mark.parametrize("p,k,n", [(2, 1, 4), (3, 1, 3), (2, 2, 3), (2, 3, 2), (3, 2, 2)])
def test_howell_membership_matches_enumerated_span(p, k, n):
    q = p ** k
    rng = random.Random(1000 * p + 10 * k + n)
    for _ in range(8):
        ngens = rng.randrange(1, 4)
        gens = [[rng.randrange(q) for _ in range(n)] for _ in range(ngens)]
        b = HowellBasis(n, p, k)
        for g in gens:
            b.insert(g)
        sp = _span(gens, q, n)
        for vec in itertools.product(range(q), repeat=n):
            assert b.contains(vec) == (vec in sp), (gens, vec)


@pytest.mark.parametrize("p,k,n", [(2, 2, 3), (3, 1, 3), (2, 3, 2)])
def test_howell_canonical_reps_split_cosets(p, k, n):
    q = p ** k
    rng = random.Random(7 * p + k + n)
    gens = [[rng.randrange(q) for _ in range(n)] for _ in range(2)]
    b = HowellBasis(n, p, k)
    for g in gens:
        b.insert(g)
    sp = _span(gens, q, n)
    reps = {}
    for vec in itertools.product(range(q), repeat=n):
        c = tuple(b.canonical(vec))
        diff = tuple((np.array(vec) - np.array(c)) % q)
        assert diff in sp  # canonical rep stays in the same coset
        key = min(tuple((np.array(vec) + np.array(s)) % q) for s in map(np.array, sp))
        if key in reps:
            assert reps[key] == c  # one representative per coset
        else:
            reps[key] = c
    assert len(reps) == q ** n // len(sp)


def test_howell_express_reproduces_member():
    rng = random.Random(42)
    p, k, n = 2, 3, 4
    q = p ** k
    gens = [[rng.randrange(q) for _ in range(n)] for _ in range(3)]
    b = HowellBasis(n, p, k, naug=3)
    for i, g in enumerate(gens):
        b.insert(g, tag=i)
    garr = np.array(gens, dtype=np.int64)
    for coeffs in itertools.product(range(q), repeat=3):
        v = (np.array(coeffs) @ garr) % q
        lam = b.express(v)
        assert lam is not None
        assert ((lam @ garr) % q == v).all()
    assert b.express([1, 0, 0, 0]) is None or (
        ((b.express([1, 0, 0, 0]) @ garr) % q == [1, 0, 0, 0]).all()
    )


@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 1)])
def test_local_snf_random(p, k):
    rng = np.random.default_rng(100 * p + k)
    q = p ** k
    for _ in range(10):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 6))
        a = rng.integers(0, q, size=(m, n))
        s = local_snf(a, p, k)
        assert s.verify(a), a
        assert s.vals == sorted(s.vals)


def test_local_snf_zero_and_empty():
    s = local_snf(np.zeros((3, 2), dtype=np.int64), 2, 2)
    assert s.vals == []
    assert s.verify(np.zeros((3, 2)))
    s = local_snf(np.zeros((0, 4), dtype=np.int64), 3, 1)
    assert s.vals == []


@pytest.mark.parametrize("p,k,n,m", [(2, 2, 3, 2), (3, 1, 3, 3), (2, 3, 2, 2), (3, 2, 2, 3)])
def test_kernel_mod_matches_enumeration(p, k, n, m):
    q = p ** k
    rng = np.random.default_rng(13 * p + k + n + m)
    for _ in range(6):
        mat = rng.integers(0, q, size=(m, n))
        ker = kernel_mod(mat, p, k)
        assert (np.asarray(mat, dtype=np.int64) @ ker % q == 0).all()
        brute = sum(
            1
            for vec in itertools.product(range(q), repeat=n)
            if not (mat @ np.array(vec) % q).any()
        )
        sp = _span(list(ker.T), q, n) if ker.shape[1] else {(0,) * n}
        assert len(sp) == brute, mat


@pytest.mark.parametrize("p,k,n", [(2, 2, 3), (3, 1, 3), (2, 3, 2)])
def test_quotient_mod_structure_and_coords(p, k, n):
    q = p ** k
    rng = np.random.default_rng(17 * p + k + n)
    for _ in range(6):
        ngens = int(rng.integers(0, 4))
        gens = rng.integers(0, q, size=(n, ngens))
        quo = quotient_mod(gens, p, k)
        sp = _span(list(gens.T), q, n) if ngens else {(0,) * n}
        order = 1
        for o in quo.orders:
            order *= o
        assert order == q ** n // len(sp)
        # coordinates separate cosets exactly
        seen = {}
        for vec in itertools.product(range(q), repeat=n):
            c = tuple(quo.coords(np.array(vec)))
            key = min(tuple((np.array(vec) + np.array(s)) % q) for s in map(np.array, sp))
            if key in seen:
                assert seen[key] == c
            else:
                seen[key] = c
        assert len(set(seen.values())) == len(seen)
        # basis columns generate their factors with the stated orders
        bas = quo.basis()
        for i, o in enumerate(quo.orders):
            assert tuple(quo.coords(bas[:, i])) == tuple(
                1 if t == i else 0 for t in range(len(quo.orders))
            )
            assert not quo.coords((bas[:, i] * o) % q).any()
