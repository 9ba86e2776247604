"""Measures on the dual group and their regularity / decay constants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from .balls import LPSystem
from .functions import DUAL, PRIMAL, GFunction, convolve, idft
from .groups import GroupSpec, SpecMismatchError, check_same_spec

Rational = Union[int, Fraction, str, float]
# Monomial exponent tuple (length n-1) -> coefficient in the base ring.
Polynomial = Mapping[tuple, int]


def as_fraction(x: Rational) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class DualMeasure:
    spec: GroupSpec
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != self.spec.size:
            raise ValueError(f"expected {self.spec.size} weights, got {w.shape[0]}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("measure weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights)

    def density(self) -> GFunction:
        """Density with respect to the dual Haar measure (mass 1/|G| per point)."""
        return GFunction(self.spec, DUAL, self.weights * self.spec.size)

    def to_json(self) -> str:
        return json.dumps(
            {
                "spec": self.spec.to_dict(),
                "weights": {str(int(i)): float(self.weights[i]) for i in self.support},
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str, size_cap: int | None = None) -> "DualMeasure":
        d = json.loads(text)
        kw = {} if size_cap is None else {"size_cap": size_cap}
        spec = GroupSpec.from_dict(d["spec"], **kw)
        w = np.zeros(spec.size)
        for k, v in d["weights"].items():
            i = int(k)
            if not 0 <= i < spec.size:
                raise ValueError(f"point index {i} out of range")
            w[i] = float(v)
        return cls(spec, w)


def point_mass(spec: GroupSpec, index: int = 0, mass: float = 1.0) -> DualMeasure:
    w = np.zeros(spec.size)
    w[index] = mass
    return DualMeasure(spec, w)


def uniform_measure(spec: GroupSpec) -> DualMeasure:
    """Normalized counting measure on the whole dual group."""
    return DualMeasure(spec, np.full(spec.size, 1.0 / spec.size))


@dataclass(frozen=True)
class MeasureProfile:
    a: Fraction
    A: float
    b: Fraction
    B: float

    def __post_init__(self):
        if self.A < 0 or self.B < 0:
            raise ValueError("A and B must be nonnegative")
        if not 0 < self.b <= self.a:
            raise ValueError(f"need 0 < b <= a, got a={self.a}, b={self.b}")


# -- variety measures ------------------------------------------------------------------


def _evaluate(spec: GroupSpec, h: Polynomial, base: np.ndarray) -> np.ndarray:
    """Evaluate h at every row of ``base`` (coordinates in the coordinate ring)."""
    out = np.zeros(base.shape[0], dtype=np.int64)
    if spec.kind == "cyclic":
        N = spec.modulus
        for mono, coeff in h.items():
            term = np.full(base.shape[0], int(coeff) % N, dtype=np.int64)
            for j, e in enumerate(mono):
                for _ in range(int(e)):
                    term = term * base[:, j] % N
            out = (out + term) % N
        return out
    gf = spec.gf
    table = gf.mul_table
    for mono, coeff in h.items():
        coeff = int(coeff)
        if not 0 <= coeff < gf.q:
            raise ValueError(f"coefficient {coeff} is not an element of F_{gf.q}")
        term = np.full(base.shape[0], coeff, dtype=np.int64)
        for j, e in enumerate(mono):
            for _ in range(int(e)):
                term = table[term, base[:, j]]
        out = gf.add_arrays(out, term)
    return out


def graph_measure(spec: GroupSpec, h: Polynomial) -> DualMeasure:
    """Normalized counting measure on the graph {(w, h(w))} over the first n-1 coordinates."""
    if spec.n < 2:
        raise ValueError("graph measures need rank n >= 2")
    for mono in h:
        if len(mono) != spec.n - 1:
            raise ValueError(f"monomial {mono} has arity {len(mono)}, expected {spec.n - 1}")
    q = spec.q
    n_base = q ** (spec.n - 1)
    idx = np.arange(n_base, dtype=np.int64)
    base = np.stack([(idx // q ** (spec.n - 2 - j)) % q for j in range(spec.n - 1)], axis=1)
    last = _evaluate(spec, h, base)
    points = idx * q + last
    w = np.zeros(spec.size)
    np.add.at(w, points, 1.0 / n_base)
    return DualMeasure(spec, w)


def paraboloid_polynomial(n: int) -> dict:
    return {tuple(2 if i == j else 0 for i in range(n - 1)): 1 for j in range(n - 1)}


def paraboloid_measure(spec: GroupSpec) -> DualMeasure:
    """Normalized counting measure on {(w, w_1^2 + ... + w_{n-1}^2)}."""
    if spec.kind == "field" and spec.modulus == 2:
        raise ValueError("paraboloids over fields of characteristic 2 are not supported")
    return graph_measure(spec, paraboloid_polynomial(spec.n))


# -- constants ---------------------------------------------------------------------------


def inverse_transform_measure(mu: DualMeasure) -> GFunction:
    """mu-check(x) = sum_xi mu({xi}) <x, xi>."""
    return GFunction(mu.spec, PRIMAL, idft(mu.spec, mu.weights * mu.spec.size))


def ball_masses(mu: DualMeasure, sys: LPSystem, rho) -> np.ndarray:
    """mu(B_rho(xi)) for every center xi, via one group convolution."""
    mask = sys.dual.at_origin(rho).astype(float)
    # B is symmetric, so mu(xi + B) = sum_eta mu(eta) 1_B(xi - eta)
    return convolve(mu.spec, mu.weights, mask).real


def regularity_constant(mu: DualMeasure, sys: LPSystem, a: Rational) -> float:
    """Smallest A with mu(B_rho(xi)) <= A rho^a for all xi and rho > 0.

    Ball masses are right-continuous steps in rho, so the ratio peaks at the
    left end of each bracket; only dual breakpoints are visited.
    """
    check_same_spec(mu.spec, sys.spec)
    a = as_fraction(a)
    if not 0 < a < sys.n:
        raise ValueError(f"a must lie in (0, {sys.n}), got {a}")
    A = 0.0
    for rho in sys.dual.breakpoints:
        A = max(A, float(ball_masses(mu, sys, rho).max()) / float(rho) ** float(a))
    return A


def decay_constant(mu: DualMeasure, sys: LPSystem, b: Rational, a: Rational | None = None) -> float:
    """Smallest B with |mu-check(x)| <= B rho^{-b/2} whenever x is outside B_rho(0).

    Each x is charged at its exit scale sup{rho : x not in B_rho(0)}; points in
    every nonempty primal ball are skipped.
    """
    check_same_spec(mu.spec, sys.spec)
    b = as_fraction(b)
    upper = as_fraction(a) if a is not None else None
    if b <= 0 or (upper is not None and b > upper) or (upper is None and b >= sys.n):
        raise ValueError(f"b must lie in (0, a], got b={b}")
    e = sys.primal.entry_scales()
    live = e > float(sys.primal.smallest_nonempty())
    if not live.any():
        return 0.0
    mag = np.abs(inverse_transform_measure(mu).values)
    return float(np.max(mag[live] * e[live] ** (float(b) / 2)))


def measure_profile(mu: DualMeasure, sys: LPSystem, a: Rational | None = None, b: Rational | None = None) -> MeasureProfile:
    """Minimal constants for the given exponents (defaults a = b = n - 1)."""
    a = as_fraction(a if a is not None else sys.n - 1)
    b = as_fraction(b if b is not None else a)
    return MeasureProfile(a, regularity_constant(mu, sys, a), b, decay_constant(mu, sys, b, a))


def regularity_constant_direct(
    mu: DualMeasure, sys: LPSystem, a: Rational, centers: np.ndarray | None = None
) -> float:
    """Second route to A: direct sums over the support, probing left limits too.

    ``centers`` restricts the maximum to the given points (default: all).
    """
    from .balls import probe_scales

    spec = mu.spec
    a = float(as_fraction(a))
    supp = mu.support
    w = mu.weights[supp]
    centers = np.arange(spec.size) if centers is None else np.asarray(centers, dtype=np.int64)
    step = max(1, 2**22 // max(len(supp), 1))
    A = 0.0
    for rho in probe_scales(sys.dual.breakpoints):
        origin = sys.dual.at_origin(rho)
        for lo in range(0, len(centers), step):
            c = centers[lo : lo + step]
            # eta in xi + B  <=>  eta - xi in B
            inside = origin[spec.sub_indices(supp[None, :], c[:, None])]
            A = max(A, float((inside @ w).max()) / float(rho) ** a)
    return A
