"""Quadratic exponential sums S(a, b) = sum_{t mod p^alpha} e((a t + b t^2) / p^alpha)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fields import is_prime, prime_power
from .groups import GroupSpec


@dataclass(frozen=True)
class QuadSumInput:
    a: int
    b: int
    p: int
    alpha: int

    def __post_init__(self):
        if self.p == 2 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        object.__setattr__(self, "a", self.a % self.modulus)
        object.__setattr__(self, "b", self.b % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.alpha


def quad_sum_bruteforce(inp: QuadSumInput) -> complex:
    M = inp.modulus
    t = np.arange(M, dtype=np.int64)
    phase = (inp.a * t + inp.b * (t * t % M)) % M
    return complex(np.exp(2j * np.pi * phase / M).sum())


def legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _gauss_sum(u: int, p: int, gamma: int) -> complex:
    """sum_{t mod p^gamma} e(u t^2 / p^gamma) for a unit u."""
    m = p**gamma
    eps = 1 if m % 4 == 1 else 1j
    return legendre(u, p) ** gamma * eps * math.sqrt(m)


def _valuation(x: int, p: int, cap: int) -> int:
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def quad_sum_closed(inp: QuadSumInput) -> complex:
    """Closed-form S(a, b) through the classical quadratic Gauss sum.

    With b = p^beta u (u a unit) and gamma = alpha - beta:
      - p^beta must divide a, else S = 0;
      - writing a = p^beta a', S = p^beta e(-a'^2 (4u)^{-1} / p^gamma) g(u; p^gamma),
        where g(u; m) = (u/p)^gamma eps_m sqrt(m), eps_m = 1 or i as m = 1 or 3 mod 4.
    """
    p, alpha, M = inp.p, inp.alpha, inp.modulus
    a, b = inp.a, inp.b
    if b == 0:
        return complex(M if a == 0 else 0)
    beta = _valuation(b, p, alpha)
    if a % p**beta:
        return 0j
    gamma = alpha - beta
    m = p**gamma
    u = (b // p**beta) % m
    a1 = (a // p**beta) % m
    shift = (-a1 * a1 * pow(4 * u, -1, m)) % m
    return p**beta * cmath.exp(2j * cmath.pi * shift / m) * _gauss_sum(u, p, gamma)


def _prime_power_modulus(spec: GroupSpec) -> tuple[int, int]:
    pp = prime_power(spec.modulus) if spec.kind == "cyclic" else None
    if pp is None or pp[0] == 2:
        raise ValueError(f"{spec.label} is not a module over Z/p^alpha with p odd")
    return pp


def paraboloid_transform_closed(spec: GroupSpec, x: Sequence[int]) -> complex:
    """mu-check(x) for the normalized paraboloid, as a product of quadratic sums."""
    p, alpha = _prime_power_modulus(spec)
    x = spec.reduce(x)
    val = 1.0 + 0j
    for xj in x[:-1]:
        val *= quad_sum_closed(QuadSumInput(xj, x[-1], p, alpha))
    return val / p ** ((spec.n - 1) * alpha)


def magnitude_law(a: int, b: int, p: int, alpha: int) -> float | None:
    """Predicted |S(a, b)|: p^alpha ||b||^{-1/2} if ||a|| <= ||b|| else 0.

    Returns None when max(||a||, ||b||) = 1, where the law makes no claim.
    """
    M = p**alpha
    na, nb = M // math.gcd(a, M), M // math.gcd(b, M)
    if max(na, nb) <= 1:
        return None
    return p**alpha / math.sqrt(nb) if na <= nb else 0.0
