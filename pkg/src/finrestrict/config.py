"""Flat ``key = value`` run configuration and parameter-grid expansion."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .fields import is_irreducible, is_prime, prime_power
from .groups import DEFAULT_SIZE_CAP, GroupSpec


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps it to exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    # grid
    groups: tuple[str, ...] = ()
    p: tuple[int, ...] = ()
    alpha: tuple[int, ...] = (1,)
    n: tuple[int, ...] = (2,)
    N: tuple[int, ...] = ()
    q: tuple[int, ...] = ()
    poly: tuple[tuple[int, tuple[int, ...]], ...] = ()  # (q, coefficients) for k > 1
    # measure
    measure: str = "paraboloid"
    h: str = ""
    weights_file: str = ""
    a: Optional[Fraction] = None
    b: Optional[Fraction] = None
    # scan
    seed: int = 0
    samples: int = 10_000
    exhaustive_cap: int = 16
    truncate: Optional[int] = None
    structured: bool = True
    lorentz_samples: int = 200
    size_cap: int = DEFAULT_SIZE_CAP
    # output
    out: str = "reports"
    format: str = "both"
    cache_dir: str = ""

    def __post_init__(self):
        for p in self.p:
            if p == 2 or not is_prime(p):
                raise ConfigError(f"p must be an odd prime, got {p}")
        for x in self.alpha:
            if x < 1:
                raise ConfigError(f"alpha must be >= 1, got {x}")
        for x in self.n:
            if x < 1:
                raise ConfigError(f"n must be >= 1, got {x}")
        for x in self.N:
            if x < 2:
                raise ConfigError(f"N must be >= 2, got {x}")
        for x in self.q:
            pp = prime_power(x)
            if pp is None or pp[0] == 2:
                raise ConfigError(f"q must be a power of an odd prime, got {x}")
        for qq, coeffs in self.poly:
            pp = prime_power(qq)
            if pp is None or len(coeffs) != pp[1] + 1 or not is_irreducible(coeffs, pp[0]):
                raise ConfigError(f"poly for q={qq} must be monic irreducible of degree {pp[1] if pp else '?'}")
        if self.measure not in ("paraboloid", "graph", "weights"):
            raise ConfigError(f"unknown measure {self.measure!r}")
        if self.measure == "graph" and not self.h:
            raise ConfigError("measure = graph needs a polynomial h")
        if self.measure == "weights" and not self.weights_file:
            raise ConfigError("measure = weights needs weights_file")
        if self.format not in ("json", "csv", "both"):
            raise ConfigError(f"format must be json, csv or both, got {self.format!r}")
        if self.samples < 0 or self.exhaustive_cap < 0 or self.size_cap < 1:
            raise ConfigError("samples, exhaustive_cap and size_cap must be nonnegative")
        if self.a is not None and self.b is not None and not 0 < self.b <= self.a:
            raise ConfigError(f"need 0 < b <= a, got a={self.a}, b={self.b}")

    # -- grid -----------------------------------------------------------------------------

    def group_specs(self) -> tuple[list[GroupSpec], list[str]]:
        """Grid points in a fixed order, and labels of those skipped by the size cap."""
        polys = dict(self.poly)
        out: list[tuple[str, int, tuple]] = []
        for label in self.groups:
            out.append(_parse_group(label))
        for n in self.n:
            for N in list(self.N) + [p**k for p in self.p for k in self.alpha]:
                out.append(("cyclic", N, (n,)))
            for q in self.q:
                p, k = prime_power(q)
                if k > 1 and q not in polys:
                    raise ConfigError(f"F_{q} needs an irreducible polynomial (key poly_{q})")
                out.append(("field", p, (n, polys.get(q, (0, 1)))))
        specs, skipped, seen = [], [], set()
        for kind, m, rest in out:
            key = (kind, m, rest)
            if key in seen:
                continue
            seen.add(key)
            n = rest[0]
            size = (m if kind == "cyclic" else m ** (len(rest[1]) - 1)) ** n
            if size > self.size_cap:
                skipped.append(_label(kind, m, rest))
                continue
            try:
                if kind == "cyclic":
                    specs.append(GroupSpec.cyclic(m, n, size_cap=self.size_cap))
                else:
                    specs.append(GroupSpec.finite_field(m, n, rest[1], size_cap=self.size_cap))
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return specs, skipped

    def canonical(self) -> dict:
        d = asdict(self)
        for k in ("a", "b"):
            if d[k] is not None:
                d[k] = str(d[k])
        d["poly"] = {str(q): list(c) for q, c in self.poly}
        return d

    def digest(self, *extra) -> str:
        text = json.dumps([self.canonical(), *extra], sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()


def _label(kind, m, rest) -> str:
    n = rest[0]
    if kind == "cyclic":
        return f"Z/{m}^{n}"
    return f"F_{m ** (len(rest[1]) - 1)}^{n}"


_GROUP_RE = re.compile(r"^(Z/|F_)(\d+)\^(\d+)(?::([\d,\s]+))?$")


def _parse_group(label: str) -> tuple[str, int, tuple]:
    """``Z/9^2``, ``F_3^2`` or ``F_9^2:1,0,1`` (coefficients constant term first)."""
    m = _GROUP_RE.match(label.strip())
    if not m:
        raise ConfigError(f"cannot parse group {label!r}; expected Z/N^n or F_q^n[:poly]")
    head, order, n = m.group(1), int(m.group(2)), int(m.group(3))
    if head == "Z/":
        if order < 2:
            raise ConfigError(f"N must be >= 2 in {label!r}")
        return ("cyclic", order, (n,))
    pp = prime_power(order)
    if pp is None:
        raise ConfigError(f"{order} is not a prime power")
    p, k = pp
    if m.group(4):
        poly = tuple(int(c) for c in m.group(4).split(","))
    elif k == 1:
        poly = (0, 1)
    else:
        raise ConfigError(f"F_{order} needs an irreducible polynomial, e.g. F_{order}^{n}:c0,...,1")
    return ("field", p, (n, poly))


# -- parsing ------------------------------------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    """``3,5,7`` or ``1-3`` or a mix such as ``1-2,5``."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if re.fullmatch(r"\d+-\d+", part):
            lo, hi = map(int, part.split("-"))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_fraction(text: str) -> Optional[Fraction]:
    return None if text.strip() in ("", "none") else Fraction(text.strip())


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip() in ("", "none") else int(text)


_PARSERS = {
    "groups": lambda t: tuple(g.strip() for g in t.split(";") if g.strip()),
    "p": _int_list,
    "alpha": _int_list,
    "n": _int_list,
    "N": _int_list,
    "q": _int_list,
    "measure": str.strip,
    "h": str.strip,
    "weights_file": str.strip,
    "a": _opt_fraction,
    "b": _opt_fraction,
    "seed": int,
    "samples": int,
    "exhaustive_cap": int,
    "truncate": _opt_int,
    "structured": _bool,
    "lorentz_samples": int,
    "size_cap": int,
    "out": str.strip,
    "format": str.strip,
    "cache_dir": str.strip,
}
KEYS = tuple(f.name for f in fields(RunConfig))


def parse_items(items: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Apply string ``key -> value`` pairs on top of ``base``."""
    changes: dict = {}
    polys = dict(base.poly) if base else {}
    for key, raw in items.items():
        if key.startswith("poly_"):
            try:
                polys[int(key[5:])] = tuple(int(c) for c in raw.split(","))
            except ValueError as exc:
                raise ConfigError(f"bad polynomial {key} = {raw!r}") from exc
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            changes[key] = _PARSERS[key](raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    changes["poly"] = tuple(sorted(polys.items()))
    try:
        return replace(base or RunConfig(), **changes)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def read_config_text(text: str) -> dict[str, str]:
    """Lines of ``key = value``; ``#`` starts a comment."""
    items: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        items[key.strip()] = value.strip()
    return items


def load_config(path: str | Path | None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Config file first, then flag overrides (flags win)."""
    items: dict[str, str] = {}
    if path is not None:
        try:
            items.update(read_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    items.update(overrides or {})
    return parse_items(items)


# -- graph polynomials ------------------------------------------------------------------------


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?((?:w\d+(?:\^\d+)?\*?)*)$")
_VAR_RE = re.compile(r"w(\d+)(?:\^(\d+))?")


def parse_polynomial(text: str, arity: int) -> dict[tuple, int]:
    """Parse ``w1^2 + 2*w2^2 + 1`` into {exponent tuple: coefficient}.

    Variables are w1..w_arity; coefficients are nonnegative integers.
    """
    poly: dict[tuple, int] = {}
    for term in text.replace(" ", "").split("+"):
        if not term:
            raise ConfigError(f"empty term in polynomial {text!r}")
        m = _TERM_RE.match(term)
        if not m or (m.group(1) is None and not m.group(2)):
            raise ConfigError(f"cannot parse term {term!r}")
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        expo = [0] * arity
        for var, e in _VAR_RE.findall(m.group(2) or ""):
            j = int(var) - 1
            if not 0 <= j < arity:
                raise ConfigError(f"variable w{var} out of range for arity {arity}")
            expo[j] += int(e) if e else 1
        key = tuple(expo)
        poly[key] = poly.get(key, 0) + coeff
    return poly
