"""Arithmetic in Z/pZ[X] and in the finite fields F_{p^k} built from it.

Field elements are encoded as integers ``e = c_0 + c_1 p + ... + c_{k-1} p^{k-1}``
where ``c_i`` is the coefficient of ``X^i``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Sequence

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k``, or None if q is not a prime power."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m`` over Z/pZ."""
    r = _trim([c % p for c in a])
    d = len(m) - 1
    while len(r) - 1 >= d:
        lead = r[-1]
        shift = len(r) - 1 - d
        for i, c in enumerate(m):
            r[shift + i] = (r[shift + i] - lead * c) % p
        _trim(r)
    return r


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = [c % p for c in poly]
    k = len(poly) - 1
    if k < 1 or poly[-1] != 1:
        return False
    for deg in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not poly_mod(poly, list(low) + [1], p):
                return False
    return True


class GaloisField:
    """The field F_{p^k} = (Z/pZ)[X] / (poly).

    ``poly`` lists coefficients from the constant term up, and must be monic
    and irreducible of degree k.
    """

    def __init__(self, p: int, poly: Sequence[int]):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        poly = tuple(int(c) % p for c in poly)
        if not is_irreducible(poly, p):
            raise ValueError(f"polynomial {poly} is not monic irreducible over Z/{p}Z")
        self.p = p
        self.poly = poly
        self.k = len(poly) - 1
        self.q = p**self.k

    def coeffs(self, e: int) -> list[int]:
        out = []
        for _ in range(self.k):
            e, c = divmod(e, self.p)
            out.append(c)
        return out

    def encode(self, coeffs: Sequence[int]) -> int:
        coeffs = poly_mod(coeffs, self.poly, self.p) if len(coeffs) > self.k else list(coeffs)
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def add(self, x: int, y: int) -> int:
        return self.encode([a + b for a, b in zip(self.coeffs(x), self.coeffs(y))])

    def neg(self, x: int) -> int:
        return self.encode([-c for c in self.coeffs(x)])

    def mul(self, x: int, y: int) -> int:
        a, b = self.coeffs(x), self.coeffs(y)
        prod = [0] * (2 * self.k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        return self.encode(poly_mod(prod, self.poly, self.p))

    def pow(self, x: int, e: int) -> int:
        result, base = 1, x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def trace(self, x: int) -> int:
        """Absolute trace x + x^p + ... + x^{p^{k-1}}, returned as a residue mod p."""
        total, y = 0, x
        for _ in range(self.k):
            total = self.add(total, y)
            y = self.pow(y, self.p)
        c = self.coeffs(total)
        if any(c[1:]):
            raise ArithmeticError("trace left the prime field")
        return c[0]

    def trace_of_power(self, m: int) -> int:
        """Tr(X^m) computed as the trace of the m-th power of the companion matrix."""
        k, p = self.k, self.p
        comp = np.zeros((k, k), dtype=np.int64)
        for i in range(1, k):
            comp[i, i - 1] = 1
        comp[:, k - 1] = [(-c) % p for c in self.poly[:k]]
        acc = np.eye(k, dtype=np.int64)
        for _ in range(m):
            acc = (acc @ comp) % p
        return int(np.trace(acc) % p)

    @cached_property
    def trace_form(self) -> np.ndarray:
        """Matrix T[i, l] = Tr(X^{i+l}) mod p, so Tr(xy) = c(x) T c(y)."""
        k = self.k
        powers = [self.trace_of_power(m) for m in range(2 * k - 1)]
        return np.array([[powers[i + l] for l in range(k)] for i in range(k)], dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        if self.k == 1:
            r = np.arange(q, dtype=np.int64)
            return np.outer(r, r) % q
        table = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(x, q):
                table[x, y] = table[y, x] = self.mul(x, y)
        return table

    def add_arrays(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorized field addition on integer encodings."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
        place = 1
        for _ in range(self.k):
            out += ((x // place % self.p + y // place % self.p) % self.p) * place
            place *= self.p
        return out

    def __repr__(self) -> str:
        return f"GaloisField(p={self.p}, poly={self.poly})"
