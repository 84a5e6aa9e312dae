"""Exact cyclotomic integers Z[zeta_m] in the power basis.

Values are dense int64 coefficient vectors of length phi(m); products are
reduced by the m-th cyclotomic polynomial.  Everything is exact integer
arithmetic; there is no floating point anywhere.
"""
from __future__ import annotations

import functools

import numpy as np


def euler_phi(m: int) -> int:
    out = m
    d = 2
    mm = m
    while d * d <= mm:
        if mm % d == 0:
            out -= out // d
            while mm % d == 0:
                mm //= d
        d += 1
    if mm > 1:
        out -= out // mm
    return out


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (constant term first)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(num) - 1, len(den) - 2, -1):
        c = num[i]
        if c % den[-1] != 0:
            raise ArithmeticError("inexact polynomial division")
        q = c // den[-1]
        out[i - len(den) + 1] = q
        if q:
            for j, dj in enumerate(den):
                num[i - len(den) + 1 + j] -= q * dj
    if any(num):
        raise ArithmeticError("nonzero remainder in exact polynomial division")
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, constant term first, monic."""
    if m == 1:
        return (-1, 1)
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in _divisors(m):
        if d < m:
            num = _poly_divide_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


class CycloRing:
    """Z[zeta_m] with vectors of length phi(m) in the power basis."""

    def __init__(self, m: int):
        self.m = m
        self.phi = euler_phi(m)
        poly = cyclotomic_polynomial(m)
        assert len(poly) == self.phi + 1 and poly[-1] == 1
        # powers[k] = zeta^k reduced into the power basis, for 0 <= k < max(m, 2 phi - 1)
        limit = max(m, 2 * self.phi - 1)
        rows = np.zeros((limit, self.phi), dtype=np.int64)
        rows[0, 0] = 1
        head = -np.asarray(poly[:-1], dtype=np.int64)  # zeta^phi in the basis
        for k in range(1, limit):
            prev = rows[k - 1]
            shifted = np.zeros(self.phi, dtype=np.int64)
            shifted[1:] = prev[:-1]
            rows[k] = shifted + prev[-1] * head
        rows.setflags(write=False)
        self.powers = rows
        conj = np.zeros((self.phi, self.phi), dtype=np.int64)
        for i in range(self.phi):
            conj[i] = self.root_power((-i) % m)
        conj.setflags(write=False)
        self._conj = conj

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.phi, dtype=np.int64)

    def integer(self, c: int) -> np.ndarray:
        v = self.zero
        v[0] = int(c)
        return v

    def root_power(self, k: int) -> np.ndarray:
        return self.powers[k % self.m].copy()

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        conv = np.convolve(u, v)
        out = conv[:self.phi].copy()
        for k in range(self.phi, conv.size):
            if conv[k]:
                out += conv[k] * self.powers[k]
        return out

    def conj(self, u: np.ndarray) -> np.ndarray:
        """Complex conjugation zeta -> zeta^{-1}."""
        return u @ self._conj

    def as_integer(self, u: np.ndarray) -> int | None:
        """The rational integer value, or None when u is not rational."""
        if any(u[1:]):
            return None
        return int(u[0])

    def conj_batch(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self._conj

    def mul_batch(self, rows: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Multiply every row by the fixed value v."""
        out = np.zeros_like(rows)
        for j in range(self.phi):
            if v[j]:
                out += v[j] * (rows @ self._shift_matrix(j))
        return out

    @functools.lru_cache(maxsize=None)
    def _shift_matrix(self, j: int) -> np.ndarray:
        """Matrix of multiplication by zeta^j in the power basis."""
        mat = np.zeros((self.phi, self.phi), dtype=np.int64)
        for i in range(self.phi):
            mat[i] = self.powers[(i + j) % self.m]
        mat.setflags(write=False)
        return mat
