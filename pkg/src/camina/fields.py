"""Exact arithmetic in GF(p^n).

Elements are coefficient vectors over Z_p (constant term first), packed as
base-p integer codes for hashing and for the packed group-element encoding.
The reducing modulus is the lexicographically least monic irreducible of the
requested degree, so repeated construction is bit-identical.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, SpecMismatchError

FIELD_CAPACITY = 1 << 20  # largest allowed field size p**n
TABLE_LIMIT = 1024  # dense numpy op tables are only built for q <= TABLE_LIMIT

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


# -- polynomial helpers over Z_p ----------------------------------------------
# Polynomials are tuples of coefficients, constant term first, no trailing
# zeros (the zero polynomial is the empty tuple).


def _trim(f):
    k = len(f)
    while k and f[k - 1] == 0:
        k -= 1
    return tuple(f[:k])


def _poly_mul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _trim(out)


def _poly_mod(f, m, p):
    # m must be monic
    f = list(f)
    dm = len(m) - 1
    for i in range(len(f) - 1, dm - 1, -1):
        c = f[i] % p
        if c:
            for j in range(dm + 1):
                f[i - dm + j] = (f[i - dm + j] - c * m[j]) % p
    return _trim(f[:dm])


def _poly_sub(f, g, p):
    size = max(len(f), len(g))
    ff = tuple(f) + (0,) * (size - len(f))
    gg = tuple(g) + (0,) * (size - len(g))
    return _trim(tuple((a - b) % p for a, b in zip(ff, gg)))


def _poly_mulmod(f, g, m, p):
    return _poly_mod(_poly_mul(f, g, p), m, p)


def _poly_powmod(f, e, m, p):
    r = (1,)
    b = _poly_mod(f, m, p)
    while e:
        if e & 1:
            r = _poly_mulmod(r, b, m, p)
        b = _poly_mulmod(b, b, m, p)
        e >>= 1
    return r


def _poly_gcd(f, g, p):
    while g:
        lead_inv = pow(g[-1], p - 2, p)
        monic = tuple((c * lead_inv) % p for c in g)
        f, g = g, _poly_mod(f, monic, p)
    return f


def _is_irreducible(m, p, n):
    """Spec test: gcd(t^{p^k} - t, m) = 1 for 0 < k < n and t^{p^n} = t (mod m)."""
    x = (0, 1)
    t = x
    for _ in range(1, n):
        t = _poly_powmod(t, p, m, p)
        if len(_poly_gcd(m, _poly_sub(t, x, p), p)) != 1:
            return False
    return _poly_powmod(t, p, m, p) == x


def _least_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree n, constant term first."""
    if n == 1:
        return (0, 1)
    coeffs = [0] * n
    while True:
        m = tuple(coeffs) + (1,)
        if _is_irreducible(m, p, n):
            return m
        i = n - 1
        while i >= 0 and coeffs[i] == p - 1:
            coeffs[i] = 0
            i -= 1
        if i < 0:  # every monic degree-n candidate tried; cannot happen
            raise RuntimeError(f"no irreducible of degree {n} over Z_{p}")
        coeffs[i] += 1


# -- field spec and elements ---------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^n) with its fixed reducing modulus (constant term first, monic)."""

    p: int
    n: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.n

    def element(self, coeffs) -> FieldElement:
        coeffs = tuple(int(c) % self.p for c in coeffs)
        if len(coeffs) != self.n:
            raise ValueError(f"need exactly {self.n} coefficients, got {len(coeffs)}")
        return FieldElement(self, coeffs)

    def from_code(self, code: int) -> FieldElement:
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} out of range for GF({self.q})")
        coeffs = []
        for _ in range(self.n):
            code, r = divmod(code, self.p)
            coeffs.append(r)
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.n)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.n - 1))

    def _check(self, *xs: FieldElement) -> None:
        for x in xs:
            if x.spec != self:
                raise SpecMismatchError(f"element of GF({x.spec.q}) used in GF({self.q})")

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        self._check(x, y)
        return FieldElement(self, tuple((a + b) % self.p for a, b in zip(x.coeffs, y.coeffs)))

    def neg(self, x: FieldElement) -> FieldElement:
        self._check(x)
        return FieldElement(self, tuple((-a) % self.p for a in x.coeffs))

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.add(x, self.neg(y))

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        self._check(x, y)
        prod = _poly_mod(_poly_mul(x.coeffs, y.coeffs, self.p), self.modulus, self.p)
        return FieldElement(self, prod + (0,) * (self.n - len(prod)))

    def inv(self, x: FieldElement) -> FieldElement:
        self._check(x)
        if x.is_zero:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self.pow(x, self.q - 2)

    def pow(self, x: FieldElement, k: int) -> FieldElement:
        self._check(x)
        if k < 0:
            return self.pow(self.inv(x), -k)
        r = self.one
        b = x
        while k:
            if k & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            k >>= 1
        return r

    def frobenius(self, x: FieldElement, k: int) -> FieldElement:
        """x |-> x^(p^k), the k-th power of the generating field automorphism."""
        self._check(x)
        if not 0 <= k < self.n:
            raise ValueError(f"frobenius power {k} out of range [0, {self.n})")
        return self.pow(x, self.p ** k)

    def units(self) -> list[FieldElement]:
        """All q - 1 nonzero elements, ascending in the packed-code order."""
        return [self.from_code(c) for c in range(1, self.q)]

    def primitive_unit(self) -> FieldElement:
        """Least-code generator of the cyclic group F*."""
        return self.from_code(_primitive_code(self))

    def render(self, x: FieldElement) -> str:
        """Base-p digit string, constant term first (GF(4): t+1 -> '11')."""
        self._check(x)
        if self.p > len(_DIGITS):
            raise ValueError(f"digit rendering supports p <= {len(_DIGITS)}")
        return "".join(_DIGITS[c] for c in x.coeffs)

    @property
    def tables(self) -> FieldTables:
        return _tables_for(self)


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(p^n): n residues mod p, coefficient of t^i at index i."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    @property
    def code(self) -> int:
        c = 0
        for a in reversed(self.coeffs):
            c = c * self.spec.p + a
        return c

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def __add__(self, other: FieldElement) -> FieldElement:
        return self.spec.add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return self.spec.sub(self, other)

    def __neg__(self) -> FieldElement:
        return self.spec.neg(self)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return self.spec.mul(self, other)

    def __pow__(self, k: int) -> FieldElement:
        return self.spec.pow(self, k)

    def inverse(self) -> FieldElement:
        return self.spec.inv(self)

    def __repr__(self) -> str:
        return f"GF({self.spec.q}):{self.spec.render(self)}"


@functools.lru_cache(maxsize=None)
def make_field(p: int, n: int) -> FieldSpec:
    """GF(p^n) with the lexicographically least monic irreducible modulus.

    Deterministic: the same (p, n) always yields the identical spec.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if n < 1:
        raise ValueError(f"extension degree must be >= 1, got {n}")
    if p ** n > FIELD_CAPACITY:
        raise CapacityError(f"GF({p}^{n}) exceeds the encoding capacity {FIELD_CAPACITY}")
    return FieldSpec(p, n, _least_irreducible(p, n))


def frobenius(x: FieldElement, k: int) -> FieldElement:
    return x.spec.frobenius(x, k)


def units(spec: FieldSpec) -> list[FieldElement]:
    return spec.units()


def _prime_divisors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


@functools.lru_cache(maxsize=None)
def _primitive_code(spec: FieldSpec) -> int:
    q = spec.q
    if q == 2:
        return 1
    prime_divs = _prime_divisors(q - 1)
    one = spec.one
    for code in range(1, q):
        u = spec.from_code(code)
        if all(spec.pow(u, (q - 1) // r) != one for r in prime_divs):
            return code
    raise RuntimeError("no primitive element found")  # unreachable


class FieldTables:
    """Dense numpy lookup tables on packed codes, for vectorized group kernels.

    Multiplicative tables come from the discrete log of the primitive unit;
    they are cross-validated against the scalar polynomial ops in the tests.
    All arrays are read-only after construction.
    """

    def __init__(self, spec: FieldSpec):
        q = spec.q
        if q > TABLE_LIMIT:
            raise CapacityError(f"op tables limited to q <= {TABLE_LIMIT}, got {q}")
        self.spec = spec
        self.q = q
        p, n = spec.p, spec.n

        codes = np.arange(q, dtype=np.int64)
        digits = np.empty((q, n), dtype=np.int64)
        rest = codes.copy()
        for i in range(n):
            rest, digits[:, i] = np.divmod(rest, p)
        weights = p ** np.arange(n, dtype=np.int64)

        def encode(dig):
            return (dig * weights).sum(axis=-1, dtype=np.int64)

        self.add = encode((digits[:, None, :] + digits[None, :, :]) % p)
        self.neg = encode((-digits) % p)

        exp = np.empty(q - 1, dtype=np.int64)
        acc = spec.one
        gamma = spec.primitive_unit()
        for i in range(q - 1):
            exp[i] = acc.code
            acc = spec.mul(acc, gamma)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self.exp, self.log = exp, log

        mul = np.zeros((q, q), dtype=np.int64)
        la = log[1:]
        mul[1:, 1:] = exp[(la[:, None] + la[None, :]) % (q - 1)]
        self.mul = mul

        inv = np.zeros(q, dtype=np.int64)
        inv[exp] = exp[(-np.arange(q - 1)) % (q - 1)]
        self.inv = inv

        frob = np.zeros((n, q), dtype=np.int64)
        frob[0] = codes
        idx = np.arange(q - 1)
        for k in range(1, n):
            fr = np.zeros(q, dtype=np.int64)
            fr[exp] = exp[(idx * pow(p, k, q - 1)) % (q - 1)]
            frob[k] = fr
        self.frob = frob

        for arr in (self.add, self.neg, self.mul, self.inv, self.frob):
            arr.setflags(write=False)


@functools.lru_cache(maxsize=None)
def _tables_for(spec: FieldSpec) -> FieldTables:
    return FieldTables(spec)
