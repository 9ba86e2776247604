"""Finite abelian groups [Z/NZ]^n and F_q^n with an explicit self-duality.

Every group is stored as a flat digit group ``(Z/mZ)^L``: for ``[Z/NZ]^n`` the
digits are the coordinates (m = N, L = n); for ``F_{p^k}^n`` each coordinate
contributes its k polynomial coefficients (m = p, L = kn), most significant
first. Points are enumerated in row-major (mixed-radix) order over those
digits, which is the same as row-major order over coordinates.

The pairing is ``<x, xi> = exp(2 pi i (d(x)^T M d(xi) mod m) / m)`` with M the
identity for cyclic modules and the block-diagonal trace form for fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from .fields import GaloisField, is_prime

DEFAULT_SIZE_CAP = 2**20

GroupPoint = Tuple[int, ...]


class SpecMismatchError(ValueError):
    """Two objects that must live on the same group do not."""


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "cyclic" or "field"
    modulus: int  # N for cyclic modules, p for fields
    n: int
    degree: int = 1
    poly: Tuple[int, ...] = ()
    size_cap: int = field(default=DEFAULT_SIZE_CAP, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"rank must be >= 1, got {self.n}")
        if self.kind == "cyclic":
            if self.modulus < 2:
                raise ValueError(f"modulus must be >= 2, got {self.modulus}")
            if self.degree != 1 or self.poly:
                raise ValueError("cyclic modules take no field polynomial")
        elif self.kind == "field":
            if not is_prime(self.modulus):
                raise ValueError(f"characteristic {self.modulus} is not prime")
            if len(self.poly) != self.degree + 1:
                raise ValueError("field polynomial must have degree+1 coefficients")
            # construction validates irreducibility
            object.__setattr__(self, "_gf", GaloisField(self.modulus, self.poly))
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.size > self.size_cap:
            raise ValueError(
                f"group {self.label} has {self.size} points, above the cap of {self.size_cap}"
            )

    @classmethod
    def cyclic(cls, N: int, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> "GroupSpec":
        return cls("cyclic", int(N), int(n), size_cap=size_cap)

    @classmethod
    def finite_field(
        cls, p: int, n: int, poly: Sequence[int] | None = None, size_cap: int = DEFAULT_SIZE_CAP
    ) -> "GroupSpec":
        """F_{p^k}^n; ``poly`` (constant term first) defaults to X, i.e. k = 1."""
        poly = tuple(int(c) for c in (poly if poly is not None else (0, 1)))
        return cls("field", int(p), int(n), len(poly) - 1, poly, size_cap=size_cap)

    # -- sizes and labels -------------------------------------------------

    @property
    def q(self) -> int:
        """Size of one coordinate ring (N or p^k)."""
        return self.modulus**self.degree

    @property
    def n_digits(self) -> int:
        return self.n * self.degree

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.modulus,) * self.n_digits

    @property
    def size(self) -> int:
        return self.q**self.n

    @property
    def label(self) -> str:
        if self.kind == "cyclic":
            return f"Z/{self.modulus}^{self.n}"
        return f"F_{self.q}^{self.n}"

    @property
    def gf(self) -> GaloisField:
        if self.kind != "field":
            raise TypeError(f"{self.label} is not a vector space over a finite field")
        return self._gf

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "modulus": self.modulus, "n": self.n}
        if self.kind == "field":
            d["poly"] = list(self.poly)
        return d

    @classmethod
    def from_dict(cls, d: dict, size_cap: int = DEFAULT_SIZE_CAP) -> "GroupSpec":
        if d["kind"] == "cyclic":
            return cls.cyclic(d["modulus"], d["n"], size_cap=size_cap)
        return cls.finite_field(d["modulus"], d["n"], d.get("poly"), size_cap=size_cap)

    # -- points -------------------------------------------------------------

    def reduce(self, coords: Sequence[int]) -> GroupPoint:
        if len(coords) != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {len(coords)}")
        if self.kind == "cyclic":
            return tuple(int(c) % self.modulus for c in coords)
        out = []
        for c in coords:
            if isinstance(c, (list, tuple)):
                c = self._gf.encode(list(c))
            c = int(c)
            if not 0 <= c < self.q:
                raise ValueError(f"field element {c} out of range for F_{self.q}")
            out.append(c)
        return tuple(out)

    def index(self, coords: Sequence[int]) -> int:
        idx = 0
        for c in self.reduce(coords):
            idx = idx * self.q + c
        return idx

    def point(self, index: int) -> GroupPoint:
        if not 0 <= index < self.size:
            raise IndexError(index)
        coords = []
        for _ in range(self.n):
            index, c = divmod(index, self.q)
            coords.append(c)
        return tuple(reversed(coords))

    @cached_property
    def coords(self) -> np.ndarray:
        """(size, n) array of coordinates in canonical order."""
        idx = np.arange(self.size, dtype=np.int64)
        return np.stack([(idx // self.q**(self.n - 1 - j)) % self.q for j in range(self.n)], axis=1)

    @cached_property
    def digits(self) -> np.ndarray:
        """(size, L) array of base-m digits in canonical order."""
        idx = np.arange(self.size, dtype=np.int64)
        L, m = self.n_digits, self.modulus
        return np.stack([(idx // m**(L - 1 - t)) % m for t in range(L)], axis=1)

    def digits_to_index(self, digits: np.ndarray) -> np.ndarray:
        m = self.modulus
        d = np.asarray(digits, dtype=np.int64) % m
        # Horner over digit columns; integer matmul has no BLAS path
        idx = d[..., 0].copy()
        for t in range(1, self.n_digits):
            idx *= m
            idx += d[..., t]
        return idx

    @cached_property
    def negation(self) -> np.ndarray:
        """Index permutation x -> -x."""
        return self.digits_to_index(-self.digits)

    def add_indices(self, i: np.ndarray | int, j: np.ndarray | int) -> np.ndarray:
        return self.digits_to_index(self.digits[i] + self.digits[j])

    def sub_indices(self, i: np.ndarray | int, j: np.ndarray | int) -> np.ndarray:
        return self.digits_to_index(self.digits[i] - self.digits[j])

    # -- duality ---------------------------------------------------------------

    @cached_property
    def form(self) -> np.ndarray:
        """The integer matrix M of the pairing on digit vectors."""
        L = self.n_digits
        if self.kind == "cyclic":
            return np.eye(L, dtype=np.int64)
        k = self.degree
        T = self._gf.trace_form
        M = np.zeros((L, L), dtype=np.int64)
        for j in range(self.n):
            for i in range(k):
                for l in range(k):
                    M[j * k + (k - 1 - i), j * k + (k - 1 - l)] = T[i, l]
        return M

    @cached_property
    def dual_permutation(self) -> np.ndarray | None:
        """Index of M d(xi) for each xi; None when M is the identity."""
        if self.kind == "cyclic":
            return None
        return self.digits_to_index(self.digits @ self.form)

    @cached_property
    def roots(self) -> np.ndarray:
        """Table of m-th roots of unity exp(2 pi i k / m)."""
        m = self.modulus
        return np.exp(2j * np.pi * np.arange(m) / m)

    def pairing_exponent(self, x: int, xi: int) -> int:
        return int(self.digits[x] @ self.form @ self.digits[xi]) % self.modulus

    def pairing_matrix(self) -> np.ndarray:
        """Dense |G| x |G| matrix of pairing values; only for small groups."""
        exps = (self.digits @ self.form @ self.digits.T) % self.modulus
        return self.roots[exps]


def character_pairing(spec: GroupSpec, x: Sequence[int], xi: Sequence[int]) -> complex:
    """Value of the character xi at the point x."""
    return complex(spec.roots[spec.pairing_exponent(spec.index(x), spec.index(xi))])


def norm_of(spec: GroupSpec, x: Sequence[int]) -> int:
    """The scale N / gcd(x_1, ..., x_n, N); for fields 1 at the origin and q elsewhere."""
    x = spec.reduce(x)
    if spec.kind == "field":
        return 1 if not any(x) else spec.q
    return spec.modulus // math.gcd(*x, spec.modulus)


def norms(spec: GroupSpec) -> np.ndarray:
    """``norm_of`` for every point, in canonical order."""
    if spec.kind == "field":
        out = np.full(spec.size, spec.q, dtype=np.int64)
        out[0] = 1
        return out
    g = np.gcd.reduce(np.concatenate([spec.coords, np.full((spec.size, 1), spec.modulus)], axis=1), axis=1)
    return spec.modulus // g


def divisors(N: int) -> list[int]:
    return [d for d in range(1, N + 1) if N % d == 0]


def check_same_spec(*specs: GroupSpec) -> None:
    first = specs[0]
    for s in specs[1:]:
        if s != first:
            raise SpecMismatchError(f"{s.label} does not match {first.label}")
