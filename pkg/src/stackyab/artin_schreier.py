"""Finite fields, reduction modulo p-th-power differences, and additive-group extension classes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from .errors import AxiomFailure, CapExceeded

__all__ = [
    "Fq",
    "FqPoly",
    "BiPoly",
    "ASClass",
    "Primitivity",
    "PdiscReport",
    "field_create",
    "as_map",
    "as_reduce",
    "is_primitive",
    "classify_primitive",
    "frobenius_character",
    "pdisc_check",
    "MAX_SCAN",
    "MAX_PDISC_ORDER",
]

_ALLOWED_P = (2, 3, 5, 7, 11, 13)
MAX_SCAN = 20000      # candidate-class cap for classify_primitive
MAX_PDISC_ORDER = 128  # field-size cap for the exhaustive dual check

_TERM_RE = re.compile(r"(?P<c>\d+)?\*?(?:t(?:\^(?P<k>\d+))?)?")


class Fq:
    """Field with p**e elements; an element index encodes its power-basis digits base p."""

    def __init__(self, p: int, e: int, modulus: tuple[int, ...] | None):
        self.p = int(p)
        self.e = int(e)
        self.q = self.p ** self.e
        if (modulus is None) != (self.e == 1):
            raise ValueError("prime fields carry no modulus, extensions need one")
        if modulus is not None:
            modulus = tuple(int(c) % self.p for c in modulus[:-1]) + (1,)
            if len(modulus) != self.e + 1:
                raise ValueError("modulus degree does not match the field degree")
        self.modulus = modulus
        self._codes = self.p ** np.arange(self.e, dtype=np.int64)
        self.digits = (np.arange(self.q, dtype=np.int64)[:, None] // self._codes) % self.p
        self._build_log_tables()
        if self.q <= 4096:
            fr = self.pow(np.arange(self.q), self.p)
            if sorted(fr.tolist()) != list(range(self.q)):
                raise AxiomFailure("the p-power map is not a bijection; modulus is not irreducible")

    def __repr__(self):
        return f"Fq({self.p}, {self.e}, {self.modulus_str()})"

    def modulus_str(self) -> str:
        if self.modulus is None:
            return "x"
        parts = []
        for i in range(self.e, -1, -1):
            c = self.modulus[i] if i < self.e else 1
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else str(c)
                parts.append(f"{head}x" + ("" if i == 1 else f"^{i}"))
        return "+".join(parts)

    # table construction

    def _mul_raw(self, a: int, b: int) -> int:
        # reference product: digit convolution reduced by the monic modulus
        if self.e == 1:
            return a * b % self.p
        prod = np.convolve(self.digits[a], self.digits[b]) % self.p
        mod = np.asarray(self.modulus, dtype=np.int64)
        for k in range(2 * self.e - 2, self.e - 1, -1):
            c = prod[k]
            if c:
                prod[k - self.e: k + 1] = (prod[k - self.e: k + 1] - c * mod) % self.p
        return int(prod[: self.e] @ self._codes)

    def _pow_raw(self, b: int, k: int) -> int:
        out = 1
        while k:
            if k & 1:
                out = self._mul_raw(out, b)
            b = self._mul_raw(b, b)
            k >>= 1
        return out

    def _build_log_tables(self):
        order = self.q - 1
        fac, m, d = set(), order, 2
        while d * d <= m:
            while m % d == 0:
                fac.add(d)
                m //= d
            d += 1
        if m > 1:
            fac.add(m)
        for g in range(1, self.q):
            if g == 1 and order > 1:
                continue
            if all(self._pow_raw(g, order // f) != 1 for f in fac):
                break
        else:
            raise AxiomFailure("no multiplicative generator; modulus is not irreducible")
        exp = np.empty(order, dtype=np.int64)
        exp[0] = 1
        for k in range(1, order):
            exp[k] = self._mul_raw(int(exp[k - 1]), g)
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(order)
        if np.any(log[1:] < 0):
            raise AxiomFailure("unit powers do not exhaust the field; modulus is not irreducible")
        self._exp, self._log, self.generator = exp, log, g

    # arithmetic on element indices (ints or integer arrays)

    def from_digits(self, d):
        v = (np.asarray(d, dtype=np.int64) % self.p) @ self._codes
        return int(v) if v.ndim == 0 else v

    def add(self, a, b):
        return self.from_digits(self.digits[a] + self.digits[b])

    def sub(self, a, b):
        return self.from_digits(self.digits[a] - self.digits[b])

    def neg(self, a):
        return self.from_digits(-self.digits[a])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        out = np.where((a == 0) | (b == 0), 0, out)
        return int(out) if out.ndim == 0 else out

    def pow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            out = np.ones_like(a)
        else:
            out = self._exp[(self._log[a] * int(k)) % (self.q - 1)]
            out = np.where(a == 0, 0, out)
        return int(out) if out.ndim == 0 else out

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero is not invertible")
        out = self._exp[(-self._log[a]) % (self.q - 1)]
        return int(out) if out.ndim == 0 else out

    def frobenius(self, a):
        return self.pow(a, self.p)

    def pth_root(self, a):
        # the inverse of Frobenius, since x -> x**p has order e
        return self.pow(a, self.p ** (self.e - 1))

    def trace(self, a):
        acc, cur = a, a
        for _ in range(self.e - 1):
            cur = self.frobenius(cur)
            acc = self.add(acc, cur)
        if np.any(np.asarray(acc) >= self.p):
            raise AxiomFailure("trace left the prime field")
        return acc

    # element strings for command-line use, polynomials in the generator t

    def show(self, a) -> str:
        a = int(a)
        if a == 0:
            return "0"
        parts = []
        for i in range(self.e - 1, -1, -1):
            d = int(self.digits[a, i])
            if not d:
                continue
            if i == 0:
                parts.append(str(d))
            else:
                head = "" if d == 1 else str(d)
                parts.append(f"{head}t" + ("" if i == 1 else f"^{i}"))
        return "+".join(parts)

    def parse(self, s: str) -> int:
        text = s.replace(" ", "").replace("**", "^").replace("-", "+-")
        if text.startswith("+"):
            text = text[1:]
        if not text:
            raise ValueError(f"empty element string {s!r}")
        total = 0
        for term in text.split("+"):
            neg = term.startswith("-")
            if neg:
                term = term[1:]
            m = _TERM_RE.fullmatch(term)
            if m is None or (m.group("c") is None and "t" not in term):
                raise ValueError(f"bad term {term!r} in element string {s!r}")
            coeff = int(m.group("c")) % self.p if m.group("c") else 1
            if "t" in term:
                if self.e == 1:
                    raise ValueError("prime-field elements are plain integers")
                k = int(m.group("k")) if m.group("k") else 1
                val = self.mul(coeff, self.pow(self.p, k))
            else:
                val = coeff
            total = self.add(total, self.neg(val) if neg else val)
        return total


def _poly_rem(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of num by monic den, coefficient lists ordered low-degree first."""
    num = [c % p for c in num]
    d = len(den) - 1
    for k in range(len(num) - 1, d - 1, -1):
        c = num[k]
        if c:
            for i in range(d + 1):
                num[k - d + i] = (num[k - d + i] - c * den[i]) % p
    return num[:d]


def _irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic divisor of degree up to half the degree."""
    e = len(coeffs) - 1
    for d in range(1, e // 2 + 1):
        for low in product(range(p), repeat=d):
            den = list(low) + [1]
            if not any(_poly_rem(list(coeffs), den, p)):
                return False
    return True


def field_create(p: int, e: int) -> Fq:
    """Field with p**e elements over the lexicographically smallest irreducible modulus."""
    p, e = int(p), int(e)
    if p not in _ALLOWED_P:
        raise ValueError("characteristic must be a prime at most 13")
    if not 1 <= e <= 4:
        raise ValueError("extension degree must be between 1 and 4")
    if e == 1:
        return Fq(p, 1, None)
    # coefficient tuples run low-degree first, so product() enumerates them in order
    for low in product(range(p), repeat=e):
        coeffs = tuple(low) + (1,)
        if _irreducible(coeffs, p):
            return Fq(p, e, coeffs)
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


def _merge(field: Fq, acc: dict, key, c) -> None:
    s = field.add(acc.get(key, 0), c)
    if s:
        acc[key] = s
    else:
        acc.pop(key, None)


@dataclass(frozen=True)
class FqPoly:
    """Sparse univariate polynomial: sorted (exponent, nonzero element) pairs."""

    field: Fq
    terms: tuple[tuple[int, int], ...]

    @staticmethod
    def make(field: Fq, coeffs: dict) -> "FqPoly":
        items = []
        for m, c in coeffs.items():
            m, c = int(m), int(c)
            if m < 0 or not 0 <= c < field.q:
                raise ValueError(f"bad term ({m}, {c})")
            if c:
                items.append((m, c))
        return FqPoly(field, tuple(sorted(items)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return self.terms[-1][0] if self.terms else -1

    def __add__(self, other: "FqPoly") -> "FqPoly":
        acc = self.as_dict()
        for m, c in other.terms:
            _merge(self.field, acc, m, c)
        return FqPoly(self.field, tuple(sorted(acc.items())))

    def __neg__(self) -> "FqPoly":
        return FqPoly(self.field, tuple((m, self.field.neg(c)) for m, c in self.terms))

    def __sub__(self, other: "FqPoly") -> "FqPoly":
        return self + (-other)

    def scale(self, c: int) -> "FqPoly":
        if not c:
            return FqPoly(self.field, ())
        return FqPoly(self.field, tuple((m, self.field.mul(c, v)) for m, v in self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in reversed(self.terms):
            shown = self.field.show(c)
            head = "" if shown == "1" and m else (f"({shown})" if "+" in shown else shown)
            parts.append(head + ("" if m == 0 else ("x" if m == 1 else f"x^{m}")))
        return "+".join(parts)


@dataclass(frozen=True)
class BiPoly:
    """Sparse bivariate polynomial: sorted ((x-exponent, y-exponent), element) pairs."""

    field: Fq
    terms: tuple[tuple[tuple[int, int], int], ...]

    @staticmethod
    def make(field: Fq, coeffs: dict) -> "BiPoly":
        items = []
        for (a, b), c in coeffs.items():
            a, b, c = int(a), int(b), int(c)
            if a < 0 or b < 0 or not 0 <= c < field.q:
                raise ValueError(f"bad term ({(a, b)}, {c})")
            if c:
                items.append(((a, b), c))
        return BiPoly(field, tuple(sorted(items)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        acc = self.as_dict()
        for k, c in other.terms:
            _merge(self.field, acc, k, c)
        return BiPoly(self.field, tuple(sorted(acc.items())))

    def __neg__(self) -> "BiPoly":
        return BiPoly(self.field, tuple((k, self.field.neg(c)) for k, c in self.terms))

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __str__(self):
        if not self.terms:
            return "0"

        def mono(a, b):
            xs = "" if a == 0 else ("x" if a == 1 else f"x^{a}")
            ys = "" if b == 0 else ("y" if b == 1 else f"y^{b}")
            return xs + ys

        parts = []
        for (a, b), c in reversed(self.terms):
            shown = self.field.show(c)
            head = "" if shown == "1" and (a or b) else (f"({shown})" if "+" in shown else shown)
            parts.append(head + mono(a, b))
        return "+".join(parts)


def as_map(u):
    """u**p - u on polynomials; the p-th power maps each term c x^m to c^p x^(mp)."""
    fld = u.field
    p = fld.p
    if isinstance(u, FqPoly):
        return FqPoly.make(fld, {m * p: fld.pow(c, p) for m, c in u.terms}) - u
    return BiPoly.make(fld, {(a * p, b * p): fld.pow(c, p) for (a, b), c in u.terms}) - u


@dataclass(frozen=True)
class ASClass:
    """Reduced class representative: zero constant term, every exponent prime to p."""

    field: Fq
    representative: FqPoly

    def __post_init__(self):
        for m, _ in self.representative.terms:
            if m % self.field.p == 0:
                raise ValueError("representative is not reduced")

    def key(self):
        return self.representative.terms

    def __str__(self):
        return str(self.representative)


def as_reduce(f: FqPoly, return_witness: bool = False):
    """Clear p-divisible exponents top down, certifying f = reduced + (u**p - u)."""
    fld = f.field
    p = fld.p
    if any(m == 0 for m, _ in f.terms):
        raise ValueError("nonzero constant term")
    cur = f.as_dict()
    wit: dict = {}
    while True:
        tops = [m for m in cur if m % p == 0]
        if not tops:
            break
        d = max(tops)
        r = fld.pth_root(cur.pop(d))
        _merge(fld, wit, d // p, r)
        _merge(fld, cur, d // p, r)
    rep = FqPoly(fld, tuple(sorted(cur.items())))
    u = FqPoly(fld, tuple(sorted(wit.items())))
    if (rep + as_map(u)).terms != f.terms:
        raise AxiomFailure("reduction certificate failed")
    cls = ASClass(fld, rep)
    return (cls, u) if return_witness else cls


def _bi_reduce(t: BiPoly, pick=max):
    """Clear terms with both exponents p-divisible; returns (residue, witness)."""
    fld = t.field
    p = fld.p
    cur = t.as_dict()
    wit: dict = {}
    while True:
        div = [k for k in cur if k[0] % p == 0 and k[1] % p == 0]
        if not div:
            break
        k = pick(div)
        if k == (0, 0):
            raise AxiomFailure("constant term admits no based reduction")
        r = fld.pth_root(cur.pop(k))
        kk = (k[0] // p, k[1] // p)
        _merge(fld, wit, kk, r)
        _merge(fld, cur, kk, r)
    return BiPoly(fld, tuple(sorted(cur.items()))), BiPoly(fld, tuple(sorted(wit.items())))


@dataclass(frozen=True)
class Primitivity:
    """Verdict with certificate: a witness u, or the nonzero residue obstructing it."""

    primitive: bool
    pairing: BiPoly
    witness: BiPoly | None
    residue: BiPoly | None

    def __bool__(self):
        return self.primitive


def _pairing(h: ASClass) -> BiPoly:
    """sum_i c_i ((x+y)^i - x^i - y^i), the defect of h against the addition law."""
    fld = h.field
    acc: dict = {}
    for i, c in h.representative.terms:
        for j in range(1, i):
            b = comb(i, j) % fld.p
            if b:
                _merge(fld, acc, (j, i - j), fld.mul(c, b))
    return BiPoly(fld, tuple(sorted(acc.items())))


def is_primitive(h: ASClass) -> Primitivity:
    """Whether the class is multiplicative for the addition law, with certificate."""
    t = _pairing(h)
    residue, wit = _bi_reduce(t)
    if (residue + as_map(wit)).terms != t.terms:
        raise AxiomFailure("reduction certificate failed")
    if residue.terms:
        return Primitivity(False, t, None, residue)
    return Primitivity(True, t, wit, None)


def classify_primitive(field: Fq, max_degree: int, max_scan: int = MAX_SCAN) -> list[ASClass]:
    """Scan reduced classes with at most two terms up to max_degree for primitive ones."""
    exps = [m for m in range(1, max_degree + 1) if m % field.p]
    units = range(1, field.q)
    total = 1 + len(exps) * (field.q - 1) + comb(len(exps), 2) * (field.q - 1) ** 2
    if total > max_scan:
        raise CapExceeded(f"scan set of {total} classes exceeds cap {max_scan}")
    cands: list[dict] = [{}]
    cands += [{m: c} for m in exps for c in units]
    cands += [{m1: c1, m2: c2} for m1, m2 in combinations(exps, 2) for c1 in units for c2 in units]
    return [h for h in (ASClass(field, FqPoly.make(field, cs)) for cs in cands) if is_primitive(h)]


def _ext_matrices(field: Fq):
    """Prime-field matrices of u -> u**p and of the base-field Frobenius on F_q[y]/(y^p-y-delta)."""
    cached = field.__dict__.get("_ext_matrices_cache")
    if cached is not None:
        return cached
    p, e, q = field.p, field.e, field.q
    delta = next(c for c in range(1, q) if field.trace(c) != 0)
    u = np.arange(q, dtype=np.int64)
    if np.any(field.sub(field.pow(u, p), u) == delta):
        raise AxiomFailure("splitting adjunction: y^p - y - delta has a root downstairs")
    n = e * p
    tgen = p if e > 1 else 1
    P = np.zeros((n, n), dtype=np.int64)
    for i in range(e):
        base = field.pow(tgen, i * p)
        for j in range(p):
            col = i + e * j
            for m in range(j + 1):
                b = comb(j, m) % p
                if not b:
                    continue
                coeff = field.mul(field.mul(base, b), field.pow(delta, j - m))
                for ii in range(e):
                    d = int(field.digits[coeff, ii])
                    if d:
                        P[ii + e * m, col] = (P[ii + e * m, col] + d) % p
    F = np.eye(n, dtype=np.int64)
    for _ in range(e):
        F = F @ P % p
    field._ext_matrices_cache = (P, F, delta)
    return field._ext_matrices_cache


def _solve_mod_p(mat: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray:
    """Gauss-Jordan solve over the p-element field; rhs may carry many columns."""
    a = np.array(mat, dtype=np.int64) % p
    b = np.array(rhs, dtype=np.int64) % p
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    rows, cols = a.shape
    row, pivots = 0, []
    for col in range(cols):
        if row == rows:
            break
        nz = np.flatnonzero(a[row:, col])
        if nz.size == 0:
            continue
        r = row + int(nz[0])
        a[[row, r]] = a[[r, row]]
        b[[row, r]] = b[[r, row]]
        inv = pow(int(a[row, col]), -1, p)
        a[row] = a[row] * inv % p
        b[row] = b[row] * inv % p
        other = np.flatnonzero(a[:, col])
        other = other[other != row]
        f = a[other, col][:, None]
        a[other] = (a[other] - f * a[row]) % p
        b[other] = (b[other] - f * b[row]) % p
        pivots.append(col)
        row += 1
    if np.any(b[row:]):
        raise AxiomFailure("inconsistent linear system")
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    x[pivots] = b[:row]
    return x[:, 0] if squeeze else x


def frobenius_character(c: int, field: Fq) -> np.ndarray:
    """Frobenius defect of a lifted point over each base point, solved upstairs."""
    p, e, q = field.p, field.e, field.q
    c = int(c)
    if not 0 <= c < q:
        raise ValueError("scalar outside the field")
    P, F, _ = _ext_matrices(field)
    n = e * p
    M = (P - np.eye(n, dtype=np.int64)) % p
    rhs = np.zeros((n, q), dtype=np.int64)
    rhs[:e] = field.digits[field.mul(c, np.arange(q, dtype=np.int64))].T
    u = _solve_mod_p(M, rhs, p)
    w = (F @ u - u) % p
    if np.any(w[1:]):
        raise AxiomFailure("Frobenius defect left the prime field")
    return w[0].copy()


@dataclass(frozen=True)
class PdiscReport:
    """Witness that the lift characters exhaust the dual of the additive group."""

    field: Fq
    characters: np.ndarray
    injective: bool
    additive: bool
    image_size: int
    hom_count: int

    @property
    def bijective(self) -> bool:
        return self.injective and self.additive and self.image_size == self.hom_count


def pdisc_check(field: Fq) -> PdiscReport:
    """Check c -> frobenius_character(c) is an additive bijection onto Hom(F_q, F_p)."""
    p, e, q = field.p, field.e, field.q
    if q > MAX_PDISC_ORDER:
        raise CapExceeded(f"field size {q} exceeds cap {MAX_PDISC_ORDER}")
    chars = np.stack([frobenius_character(c, field) for c in range(q)])
    g = np.arange(q, dtype=np.int64)
    table = field.add(g[:, None], g[None, :])
    additive = bool(
        np.array_equal(chars[table], (chars[:, None, :] + chars[None, :, :]) % p)
        and np.array_equal(chars[:, table], (chars[:, :, None] + chars[:, None, :]) % p)
    )
    image = {tuple(r) for r in chars.tolist()}
    report = PdiscReport(field, chars, len(image) == q, additive, len(image), p ** e)
    if not report.bijective:
        raise AxiomFailure("characters do not exhaust the dual", report)
    return report
