"""Littlewood-Paley ball systems on finite groups and their constants.

A ball family is a rule ``(center, rho) -> boolean mask``. Every family here
is a step function of rho: it only changes at finitely many breakpoints, so
all "for every rho > 0" statements reduce to the breakpoints plus their left
limits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .functions import dft
from .groups import GroupSpec, divisors
from .report import Record, VerificationReport

log = logging.getLogger(__name__)

Rule = Callable[[int, Fraction], np.ndarray]


@dataclass(frozen=True)
class ScaleSet:
    """Breakpoints of the primal and dual ball families, ascending."""

    primal: tuple[Fraction, ...]
    dual: tuple[Fraction, ...]

    def __post_init__(self):
        for s in (self.primal, self.dual):
            if list(s) != sorted(s) or len(set(s)) != len(s):
                raise ValueError("scales must be strictly increasing")

    @property
    def max_ratio(self) -> float:
        """Largest ratio between consecutive primal scales (1 for a single scale)."""
        p = self.primal
        return max([float(b / a) for a, b in zip(p, p[1:])], default=1.0)


@dataclass(frozen=True, eq=False)
class BallFamily:
    spec: GroupSpec
    side: str  # "G" or "dual"
    breakpoints: tuple[Fraction, ...]
    rule: Rule

    def ball(self, center: int, rho) -> np.ndarray:
        return np.asarray(self.rule(int(center), Fraction(rho)), dtype=bool)

    def at_origin(self, rho) -> np.ndarray:
        return self.ball(0, rho)

    def entry_scales(self) -> np.ndarray:
        """Smallest breakpoint at which each point enters the ball at the origin.

        Points that never enter get +inf. This is also the exit scale
        ``sup{rho : x not in B_rho(0)}`` under the closure convention.
        """
        out = np.full(self.spec.size, np.inf)
        for rho in reversed(self.breakpoints):
            out[self.at_origin(rho)] = float(rho)
        return out

    def smallest_nonempty(self) -> Fraction:
        for rho in self.breakpoints:
            if self.at_origin(rho).any():
                return rho
        raise ValueError("ball family is empty at every scale")


@dataclass(frozen=True, eq=False)
class LPSystem:
    spec: GroupSpec
    primal: BallFamily
    dual: BallFamily
    C1: float = float("nan")
    C2: float = float("nan")
    C3: float = float("nan")
    name: str = ""

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def scales(self) -> ScaleSet:
        return ScaleSet(self.primal.breakpoints, self.dual.breakpoints)

    @property
    def constants(self) -> tuple[float, float, float]:
        return (self.C1, self.C2, self.C3)

    def projection_scales(self) -> tuple[Fraction, ...]:
        """Primal breakpoints at which phi_rho is nonzero."""
        return tuple(r for r in self.primal.breakpoints if self.primal.at_origin(r).any())

    def phi(self, rho) -> np.ndarray:
        """phi_rho = indicator of B_rho(0) on G, as floats."""
        return self.primal.at_origin(rho).astype(float)

    def with_constants(self, C1: float, C2: float, C3: float) -> "LPSystem":
        return LPSystem(self.spec, self.primal, self.dual, C1, C2, C3, self.name)


# -- concrete families ----------------------------------------------------------------


def _translate(spec: GroupSpec, origin_mask: np.ndarray, center: int) -> np.ndarray:
    if center == 0:
        return origin_mask
    return origin_mask[spec.sub_indices(np.arange(spec.size), center)]


def _divisor_block(spec: GroupSpec, d: int) -> np.ndarray:
    """B_d = {x : (N/d) divides every coordinate}."""
    step = spec.modulus // d
    return np.all(spec.coords % step == 0, axis=1)


def cyclic_families(spec: GroupSpec) -> tuple[BallFamily, BallFamily]:
    """Divisor-union balls on [Z/NZ]^n and on its dual.

    Primal: x + union of B_d over divisors d <= rho.
    Dual:   xi + union of B_{N/d} over divisors d >= 1/rho.
    For N = p^alpha these reduce to x + B_{p^nu}, nu maximal with p^nu <= rho,
    and xi + B_{p^{alpha-nu}}, nu minimal with p^nu >= 1/rho.
    """
    N = spec.modulus
    divs = divisors(N)
    blocks = {d: _divisor_block(spec, d) for d in divs}
    empty = np.zeros(spec.size, dtype=bool)

    @lru_cache(maxsize=None)
    def primal_origin(rho: Fraction) -> np.ndarray:
        mask = empty.copy()
        for d in divs:
            if d <= rho:
                mask |= blocks[d]
        mask.setflags(write=False)
        return mask

    @lru_cache(maxsize=None)
    def dual_origin(rho: Fraction) -> np.ndarray:
        mask = empty.copy()
        for d in divs:
            if rho > 0 and d >= 1 / rho:
                mask |= blocks[N // d]
        mask.setflags(write=False)
        return mask

    primal = BallFamily(
        spec, "G", tuple(Fraction(d) for d in divs),
        lambda c, rho: _translate(spec, primal_origin(rho), c),
    )
    dual = BallFamily(
        spec, "dual", tuple(sorted(Fraction(1, d) for d in divs)),
        lambda c, rho: _translate(spec, dual_origin(rho), c),
    )
    return primal, dual


def field_families(spec: GroupSpec) -> tuple[BallFamily, BallFamily]:
    """The three-tier balls on F_q^n: empty, a point, everything."""
    q = spec.q
    size = spec.size

    def tiers(lo: Fraction, hi: Fraction) -> Rule:
        def rule(c: int, rho: Fraction) -> np.ndarray:
            if rho < lo:
                return np.zeros(size, dtype=bool)
            if rho < hi:
                m = np.zeros(size, dtype=bool)
                m[c] = True
                return m
            return np.ones(size, dtype=bool)

        return rule

    primal = BallFamily(spec, "G", (Fraction(1), Fraction(q)), tiers(Fraction(1), Fraction(q)))
    dual = BallFamily(spec, "dual", (Fraction(1, q), Fraction(1)), tiers(Fraction(1, q), Fraction(1)))
    return primal, dual


def build_lp_system(spec: GroupSpec, *, compute_constants: bool = True) -> LPSystem:
    if spec.kind == "cyclic":
        primal, dual = cyclic_families(spec)
    elif spec.kind == "field":
        primal, dual = field_families(spec)
    else:
        raise ValueError(f"unsupported group kind {spec.kind!r}")
    sys = LPSystem(spec, primal, dual, name=spec.label)
    if compute_constants:
        sys = sys.with_constants(*compute_system_constants(sys))
    return sys


# -- constants ---------------------------------------------------------------------------


def phi_hat(sys: LPSystem, rho) -> np.ndarray:
    """Fourier transform of phi_rho; real because every ball is symmetric."""
    return dft(sys.spec, sys.phi(rho)).real


def _skip_mask(sys: LPSystem) -> np.ndarray:
    """Dual points xi with -xi in every nonempty dual ball; (F) says nothing about them."""
    e = sys.dual.entry_scales()[sys.spec.negation]
    return e <= float(sys.dual.smallest_nonempty())


def compute_system_constants(sys: LPSystem) -> tuple[float, float, float]:
    """Minimal (C1, C2, C3) for (R), (F), (F') under the closure convention.

    C1: max over primal breakpoints of m(B_rho(0)) / rho^n.
    C2: max over projection scales rho and over non-skipped xi with
        s_exit(xi) >= 1/rho of |phi_hat_rho(xi)| * s_exit(xi)^n, where
        s_exit(xi) is the dual entry scale of -xi.
    C3: max over rho of the dual-normalized L^1 norm of phi_hat_rho.
    Ties in the maxima resolve to the smaller rho.
    """
    spec, n = sys.spec, sys.n
    C1 = 0.0
    for rho in sys.primal.breakpoints:
        C1 = max(C1, int(sys.primal.at_origin(rho).sum()) / float(rho) ** n)

    s_exit = sys.dual.entry_scales()[spec.negation]
    skip = _skip_mask(sys)
    C2 = C3 = 0.0
    for rho in sys.projection_scales():
        ph = np.abs(phi_hat(sys, rho))
        valid = ~skip & (s_exit >= float(1 / rho))
        if valid.any():
            C2 = max(C2, float(np.max(ph[valid] * s_exit[valid] ** n)))
        C3 = max(C3, float(ph.sum() / spec.size))
    return C1, C2, C3


# -- verification -------------------------------------------------------------------------


def probe_scales(breakpoints: Sequence[Fraction]) -> list[Fraction]:
    """Breakpoints, points just below each, midpoints, and values outside the range."""
    bps = sorted(breakpoints)
    out = {bps[0] / 2, bps[-1] * 2}
    for i, b in enumerate(bps):
        out.add(b)
        out.add(b * (1 - Fraction(1, 10**9)))
        if i + 1 < len(bps):
            out.add((b + bps[i + 1]) / 2)
    return sorted(out)


def _subset(a: np.ndarray, b: np.ndarray) -> bool:
    return not np.any(a & ~b)


def verify_axioms(
    sys: LPSystem, *, center_cap: int = 4096, seed: int = 0
) -> VerificationReport:
    """Check nesting, symmetry, covering and translation invariance.

    Both families are checked at every probe scale. Translation invariance is
    checked at every center when |G| <= center_cap and at a seeded sample of
    ``center_cap`` centers otherwise.
    """
    spec = sys.spec
    report = VerificationReport(name="axioms", seed=seed)
    if spec.size <= center_cap:
        centers = np.arange(spec.size)
    else:
        rng = np.random.default_rng(seed)
        centers = np.sort(rng.choice(spec.size, size=center_cap, replace=False))

    for fam in (sys.primal, sys.dual):
        tag = f"{sys.name}:{fam.side}"
        scales = probe_scales(fam.breakpoints)
        origin = {r: fam.at_origin(r) for r in scales}

        witness = None
        for r1, r2 in zip(scales, scales[1:]):
            bad = origin[r1] & ~origin[r2]
            if bad.any():
                witness = {"rho": str(r1), "rho_next": str(r2), "point": spec.point(int(np.argmax(bad)))}
                break
        report.add(Record.flag("nesting", tag, witness is None, witness=witness))

        witness = None
        for r in scales:
            m = origin[r]
            bad = m != m[spec.negation]
            if bad.any():
                witness = {"rho": str(r), "point": spec.point(int(np.argmax(bad)))}
                break
        report.add(Record.flag("symmetry", tag, witness is None, witness=witness))

        top = fam.at_origin(fam.breakpoints[-1])
        witness = None if top.all() else {"point": spec.point(int(np.argmin(top)))}
        report.add(Record.flag("covering", tag, witness is None, witness=witness))

        witness = None
        all_idx = np.arange(spec.size)
        for r in fam.breakpoints:
            if witness is not None:
                break
            m0 = origin[r]
            for c in centers:
                expected = m0[spec.sub_indices(all_idx, int(c))]
                if not np.array_equal(fam.ball(int(c), r), expected):
                    witness = {"rho": str(r), "center": spec.point(int(c))}
                    break
        report.add(
            Record.flag(
                "translation_invariance", tag, witness is None, witness=witness,
                params={"centers_checked": int(len(centers))},
            )
        )

    for rho in probe_scales(sys.primal.breakpoints):
        phi = sys.primal.at_origin(rho)
        if not phi.any():
            continue
        ok = _subset(phi, sys.primal.at_origin(2 * rho))
        report.add(Record.flag("phi_support", sys.name, ok, params={"rho": str(rho)}))
    return report


def verify_conditions(sys: LPSystem, tol: float = 1e-9) -> VerificationReport:
    """Re-check (R), (F), (F') with the stored constants by direct enumeration.

    Independent of ``compute_system_constants``: it probes rho and s at and
    between breakpoints, tests ball membership directly rather than through
    entry scales, and uses strict "not in the ball" semantics.
    """
    spec, n = sys.spec, sys.n
    report = VerificationReport(name="conditions")
    C1, C2, C3 = sys.constants

    for rho in probe_scales(sys.primal.breakpoints):
        m = float(sys.primal.at_origin(rho).sum())
        report.add(Record.bounded("R", sys.name, C1 * float(rho) ** n, m, scale=rho, tol=tol))

    skip = _skip_mask(sys)
    s_probe = probe_scales(sys.dual.breakpoints)
    dual_masks = {s: sys.dual.at_origin(s)[spec.negation] for s in s_probe}
    for rho in probe_scales(sys.primal.breakpoints):
        phi = sys.phi(rho)
        if not phi.any():
            continue
        ph = np.abs(dft(spec, phi).real)
        worst, worst_bound = 0.0, 0.0
        worst_ratio = -1.0
        for s in s_probe:
            if s < 1 / rho:
                continue
            outside = ~dual_masks[s] & ~skip
            if not outside.any():
                continue
            obs = float(ph[outside].max())
            bound = C2 * float(s) ** (-n)
            ratio = obs / bound if bound > 0 else (np.inf if obs > 0 else 0.0)
            if ratio > worst_ratio:
                worst, worst_bound, worst_ratio = obs, bound, ratio
        if worst_ratio >= 0:
            report.add(Record.bounded("F", sys.name, worst_bound, worst, scale=rho, tol=tol))
        report.add(Record.bounded("F_prime", sys.name, C3, float(ph.sum() / spec.size), scale=rho, tol=tol))
        report.add(Record.bounded("phi_sup", sys.name, 1.0, float(phi.max()), scale=rho, tol=tol))
    return report
