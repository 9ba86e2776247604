"""Functions on G and its dual, Fourier transforms, and L^p / Lorentz norms.

Normalizations: counting measure on G, mass ``1/|G|`` per point on the dual.
With these, ``fourier_forward`` and ``fourier_inverse`` are mutually inverse
and Plancherel holds with no extra constants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .groups import GroupSpec, SpecMismatchError

PRIMAL = "G"
DUAL = "dual"

Exponent = Union[int, float, Fraction]


class DomainError(ValueError):
    """A function tagged for one side of the duality was used on the other."""


@dataclass(frozen=True, eq=False)
class GFunction:
    spec: GroupSpec
    domain: str
    values: np.ndarray

    def __post_init__(self):
        if self.domain not in (PRIMAL, DUAL):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if values.shape[0] != self.spec.size:
            raise ValueError(f"expected {self.spec.size} values, got {values.shape[0]}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def weight(self) -> float:
        """Measure of a single point."""
        return 1.0 if self.domain == PRIMAL else 1.0 / self.spec.size

    def _check(self, other: "GFunction") -> None:
        if other.spec != self.spec:
            raise SpecMismatchError(f"{other.spec.label} vs {self.spec.label}")
        if other.domain != self.domain:
            raise DomainError(f"cannot combine a function on {self.domain} with one on {other.domain}")

    def __add__(self, other: "GFunction") -> "GFunction":
        self._check(other)
        return GFunction(self.spec, self.domain, self.values + other.values)

    def __sub__(self, other: "GFunction") -> "GFunction":
        self._check(other)
        return GFunction(self.spec, self.domain, self.values - other.values)

    def __mul__(self, other: "GFunction") -> "GFunction":
        self._check(other)
        return GFunction(self.spec, self.domain, self.values * other.values)

    def integral(self) -> complex:
        return complex(self.values.sum() * self.weight)

    def inner(self, other: "GFunction") -> complex:
        """<f, g> = integral of f * conj(g)."""
        self._check(other)
        return complex(np.vdot(other.values, self.values) * self.weight)

    def to_json(self) -> str:
        return json.dumps(
            {
                "spec": self.spec.to_dict(),
                "domain": self.domain,
                "values": [[float(v.real), float(v.imag)] for v in self.values],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GFunction":
        d = json.loads(text)
        spec = GroupSpec.from_dict(d["spec"])
        vals = np.array([complex(re, im) for re, im in d["values"]])
        return cls(spec, d["domain"], vals)


def delta(spec: GroupSpec, index: int = 0, domain: str = PRIMAL) -> GFunction:
    v = np.zeros(spec.size, dtype=complex)
    v[index] = 1.0
    return GFunction(spec, domain, v)


def indicator(spec: GroupSpec, mask: np.ndarray, domain: str = PRIMAL) -> GFunction:
    return GFunction(spec, domain, np.asarray(mask, dtype=float))


# -- transforms on raw arrays ---------------------------------------------------
# These accept a trailing axis of length |G| so that many functions can be
# transformed in one call.


def dft(spec: GroupSpec, values: np.ndarray) -> np.ndarray:
    """hat f(xi) = sum_x f(x) <x, -xi> along the last axis."""
    values = np.asarray(values, dtype=complex)
    lead = values.shape[:-1]
    L = spec.n_digits
    out = np.fft.fftn(values.reshape(lead + spec.shape), axes=tuple(range(-L, 0)))
    out = out.reshape(lead + (spec.size,))
    perm = spec.dual_permutation
    return out if perm is None else out[..., perm]


def idft(spec: GroupSpec, values: np.ndarray) -> np.ndarray:
    """f(x) = |G|^{-1} sum_xi g(xi) <x, xi> along the last axis."""
    values = np.asarray(values, dtype=complex)
    lead = values.shape[:-1]
    perm = spec.dual_permutation
    if perm is not None:
        moved = np.empty_like(values)
        moved[..., perm] = values
        values = moved
    L = spec.n_digits
    out = np.fft.ifftn(values.reshape(lead + spec.shape), axes=tuple(range(-L, 0)))
    return out.reshape(lead + (spec.size,))


def convolve(spec: GroupSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Unnormalized group convolution sum_y f(y) g(x - y) along the last axis."""
    return idft(spec, dft(spec, f) * dft(spec, g))


def dft_naive(spec: GroupSpec, values: np.ndarray) -> np.ndarray:
    """Direct O(|G|^2) evaluation from the pairing table; an oracle for ``dft``."""
    P = spec.pairing_matrix()
    return np.asarray(values, dtype=complex) @ P.conj()


# -- public operations ------------------------------------------------------------


def fourier_forward(f: GFunction) -> GFunction:
    if f.domain != PRIMAL:
        raise DomainError("fourier_forward expects a function on G")
    return GFunction(f.spec, DUAL, dft(f.spec, f.values))


def fourier_inverse(g: GFunction) -> GFunction:
    if g.domain != DUAL:
        raise DomainError("fourier_inverse expects a function on the dual group")
    return GFunction(g.spec, PRIMAL, idft(g.spec, g.values))


def lp_norm(f: GFunction, p: Exponent) -> float:
    a = np.abs(f.values)
    if p == float("inf"):
        return float(a.max())
    p = float(p)
    if p <= 0:
        raise ValueError("p must be positive")
    return float((np.sum(a**p) * f.weight) ** (1.0 / p))


def lorentz_norm(f: GFunction, p: Exponent, s: Exponent) -> float:
    """Lorentz quasi-norm ||f||_{p,s} from the decreasing rearrangement.

    The rearrangement of a function on a finite group is a step function with
    steps of width ``f.weight``, so the defining integral is summed exactly:
    step k contributes ``v_k^s (p/s) ((k w)^{s/p} - ((k-1) w)^{s/p})``.
    """
    p = float(p)
    if p <= 0:
        raise ValueError("p must be positive")
    v = np.sort(np.abs(f.values))[::-1]
    v = v[v > 0]
    if v.size == 0:
        return 0.0
    w = f.weight
    t = w * np.arange(1, v.size + 1)
    if s == float("inf"):
        return float(np.max(t ** (1.0 / p) * v))
    s = float(s)
    if s <= 0:
        raise ValueError("s must be positive")
    edges = t ** (s / p)
    steps = np.diff(np.concatenate([[0.0], edges]))
    return float(((p / s) * np.sum(v**s * steps)) ** (1.0 / s))
