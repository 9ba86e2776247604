"""Exponent and constant arithmetic for the restriction and convolution estimates.

Exponents are exact rationals; constants are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .measures import MeasureProfile, Rational, as_fraction


def conjugate(p: Fraction) -> Fraction | float:
    """Hoelder conjugate p / (p - 1); infinite at p = 1."""
    if p == 1:
        return math.inf
    return p / (p - 1)


@dataclass(frozen=True)
class ExponentProfile:
    n: int
    a: Fraction
    b: Fraction
    r0: Fraction
    theta: Fraction
    sigma: Fraction
    tau: Fraction
    conv_r0: Fraction
    conv_s0: Fraction

    @property
    def r0_conj(self):
        return conjugate(self.r0)

    @property
    def sigma_conj(self):
        return conjugate(self.sigma)

    @property
    def tau_conj(self):
        return conjugate(self.tau)

    @property
    def conv_s0_conj(self):
        return conjugate(self.conv_s0)

    def as_dict(self) -> dict:
        keys = ("n", "a", "b", "r0", "theta", "sigma", "tau", "conv_r0", "conv_s0")
        d = {k: getattr(self, k) for k in keys}
        d.update(
            r0_conj=self.r0_conj, sigma_conj=self.sigma_conj,
            tau_conj=self.tau_conj, conv_s0_conj=self.conv_s0_conj,
        )
        return d


def exponent_profile(n: int, a: Rational, b: Rational) -> ExponentProfile:
    a, b = as_fraction(a), as_fraction(b)
    if not 0 < b <= a < n:
        raise ValueError(f"need 0 < b <= a < n, got n={n}, a={a}, b={b}")
    c = n - a
    r0 = (4 * c + 2 * b) / (4 * c + b)
    theta = 2 * c / (2 * c + b)
    big = 2 * (c + b) * (2 * c + b)
    sigma = big / (big - b * b)
    tau = 2 * (c + b) / b
    conv_r0 = (2 * c + b) / (c + b)
    conv_s0 = (2 * c + b) / c
    return ExponentProfile(n, a, b, r0, theta, sigma, tau, conv_r0, conv_s0)


@dataclass(frozen=True)
class SystemConstants:
    C1: float
    C2: float
    C3: float
    A: float
    B: float
    n: int
    a: Fraction

    @property
    def K1(self) -> float:
        """2^n (C1 + C2 / (2^{n-a} - 1)) A, the coefficient bounding ||mu_1||_inf."""
        return 2.0**self.n * (self.C1 + self.C2 / (2.0 ** float(self.n - self.a) - 1.0)) * self.A

    @classmethod
    def from_parts(cls, sys, profile: MeasureProfile) -> "SystemConstants":
        return cls(sys.C1, sys.C2, sys.C3, profile.A, profile.B, sys.n, profile.a)


def cbar_constant(profile: ExponentProfile, constants: SystemConstants, C_nab: float) -> float:
    """C_{n,a,b} (C1+C2)^{1-t} C3^{(1-t)/(2-t)} A^{1-t} B^t with t = theta."""
    t = float(profile.theta)
    k = constants
    return (
        C_nab
        * (k.C1 + k.C2) ** (1 - t)
        * k.C3 ** ((1 - t) / (2 - t))
        * k.A ** (1 - t)
        * k.B**t
    )


def _minimize(scales: Sequence, term) -> tuple[float, Fraction]:
    if not scales:
        raise ValueError("scale set is empty")
    best, best_rho = math.inf, None
    for rho in sorted(scales):
        val = term(float(rho))
        if val < best:
            best, best_rho = val, rho
    return best, best_rho


def envelope_weak(mE: float, constants: SystemConstants, profile: ExponentProfile, scales: Sequence) -> tuple[float, Fraction]:
    """min over scales of K1 m(E) rho^{n-a} + 2 B m(E)^2 rho^{-b/2}, and the minimizing rho."""
    if mE <= 0:
        raise ValueError("m(E) must be positive")
    c, d = float(profile.n - profile.a), float(profile.b) / 2
    K1, B = constants.K1, constants.B
    return _minimize(scales, lambda r: K1 * mE * r**c + 2 * B * mE * mE * r ** (-d))


def envelope_conv(
    mE: float, mF: float, constants: SystemConstants, profile: ExponentProfile, scales: Sequence
) -> tuple[float, Fraction]:
    """min over scales of K1 m(E) m(F) rho^{n-a} + 2 B (m(E) m(F))^{1/2} rho^{-b/2}."""
    if mE <= 0 or mF <= 0:
        raise ValueError("set measures must be positive")
    c, d = float(profile.n - profile.a), float(profile.b) / 2
    K1, B = constants.K1, constants.B
    prod = mE * mF
    root = math.sqrt(prod)
    return _minimize(scales, lambda r: K1 * prod * r**c + 2 * B * root * r ** (-d))


def two_term_infimum(alpha: float, beta: float, c: float, d: float, lo: float = 0.0, hi: float = math.inf) -> float:
    """inf over rho in [lo, hi] (rho > 0) of alpha rho^c + beta rho^{-d}, alpha, beta >= 0."""
    f = lambda r: alpha * r**c + beta * r ** (-d)
    if beta == 0:
        return f(lo) if lo > 0 else 0.0
    if alpha == 0:
        return f(hi) if math.isfinite(hi) else 0.0
    rho = (beta * d / (alpha * c)) ** (1.0 / (c + d))
    rho = min(max(rho, lo), hi)
    return f(rho)
