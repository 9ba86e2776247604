"""Structured pass/fail records and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional

SCHEMA_VERSION = 1
CSV_COLUMNS = ("system", "n", "scale", "quantity", "bound", "observed", "pass")
REL_TOL = 1e-9
ABS_TOL = 1e-12


def jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return jsonable(x.item())
    return x


def within(observed: float, bound: float, tol: float = REL_TOL) -> bool:
    return observed <= bound * (1 + tol) + ABS_TOL


@dataclass
class Record:
    check: str
    system: str
    bound: Optional[float] = None
    observed: Optional[float] = None
    passed: Optional[bool] = None
    scale: Any = None
    params: dict = field(default_factory=dict)
    witness: Any = None

    @property
    def ratio(self) -> Optional[float]:
        if self.bound is None or self.observed is None:
            return None
        if self.bound == 0:
            return 0.0 if self.observed == 0 else math.inf
        return self.observed / self.bound

    @classmethod
    def bounded(cls, check, system, bound, observed, *, scale=None, tol=REL_TOL, params=None, witness=None):
        bound, observed = float(bound), float(observed)
        ok = within(observed, bound, tol)
        # witnesses are kept only for failures; a callable is evaluated lazily
        if ok:
            witness = None
        elif callable(witness):
            witness = witness()
        return cls(check, system, bound, observed, ok, scale, dict(params or {}), witness)

    @classmethod
    def flag(cls, check, system, ok, *, witness=None, params=None, scale=None):
        return cls(check, system, None, None, bool(ok), scale, dict(params or {}), witness)

    @classmethod
    def info(cls, check, system, observed, reference=None, *, scale=None, params=None, witness=None):
        """A reported-only value: never affects the pass flag."""
        return cls(
            check, system,
            None if reference is None else float(reference), float(observed),
            None, scale, dict(params or {}), witness,
        )

    def to_dict(self) -> dict:
        return jsonable(
            {
                "check": self.check,
                "system": self.system,
                "scale": self.scale,
                "params": self.params,
                "bound": self.bound,
                "observed": self.observed,
                "ratio": self.ratio,
                "pass": self.passed,
                "witness": self.witness,
            }
        )


@dataclass
class VerificationReport:
    name: str
    records: list[Record] = field(default_factory=list)
    seed: Optional[int] = None
    timing: dict = field(default_factory=dict)

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    def extend(self, other: "VerificationReport | Iterable[Record]") -> None:
        recs = other.records if isinstance(other, VerificationReport) else other
        self.records.extend(recs)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.records)

    def failures(self) -> list[Record]:
        return [r for r in self.records if r.passed is False]

    def find(self, check: str) -> list[Record]:
        return [r for r in self.records if r.check == check]

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "name": self.name,
            "pass": self.passed,
            "seed": self.seed,
            "records": [r.to_dict() for r in self.records],
        }
        if include_timing:
            d["timing"] = jsonable(self.timing)
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)

    def csv_rows(self, n: int | None = None) -> list[dict]:
        return [record_row(r, n) for r in self.records]


def record_row(r: Record, n: int | None) -> dict:
    scale = r.scale
    return {
        "system": r.system,
        "n": "" if n is None else n,
        "scale": "" if scale is None else str(jsonable(scale)),
        "quantity": r.check,
        "bound": "" if r.bound is None else repr(r.bound),
        "observed": "" if r.observed is None else repr(r.observed),
        "pass": "" if r.passed is None else str(r.passed).lower(),
    }


def write_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
