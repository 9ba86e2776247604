"""Command-line front end: system-check, measure-analyze, verify, exponents, scan.

Exit status: 0 when every hard check passes, 1 on any failed check, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .balls import build_lp_system, verify_axioms, verify_conditions
from .config import ConfigError, RunConfig, load_config, parse_polynomial
from .exponents import SystemConstants, cbar_constant, exponent_profile
from .groups import GroupSpec
from .measures import DualMeasure, graph_measure, measure_profile, paraboloid_measure
from .report import SCHEMA_VERSION, Record, VerificationReport, jsonable, record_row, write_csv
from .verifier import ScanStrategy, measure_report, verify_all

log = logging.getLogger("finrestrict")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# The all-pairs convolution scan is exhaustive only up to this many points,
# (2^11 - 1)^2 pairs being about the default pair cap.
CONV_EXHAUSTIVE_POINTS = 11


# -- per-group work ------------------------------------------------------------------------------


def _exponents_for(cfg: RunConfig, n: int) -> tuple[Fraction, Fraction]:
    a = cfg.a if cfg.a is not None else Fraction(n - 1)
    b = cfg.b if cfg.b is not None else a
    if not 0 < b <= a < n:
        raise ConfigError(f"need 0 < b <= a < n, got n={n}, a={a}, b={b}")
    return a, b


def _build_measure(cfg: RunConfig, spec: GroupSpec) -> DualMeasure:
    try:
        if cfg.measure == "weights":
            mu = DualMeasure.from_json(Path(cfg.weights_file).read_text(), size_cap=cfg.size_cap)
            if mu.spec != spec:
                raise ConfigError(f"weights file is for {mu.spec.label}, not {spec.label}")
            return mu
        if cfg.measure == "graph":
            return graph_measure(spec, parse_polynomial(cfg.h, spec.n - 1))
        return paraboloid_measure(spec)
    except OSError as exc:
        raise ConfigError(f"cannot read weights file: {exc}") from exc
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _info(name: str, system: str, values: dict) -> VerificationReport:
    rep = VerificationReport(name=name)
    for k, v in values.items():
        rep.add(Record.info(k, system, float(v)))
    return rep


def point_system_check(cfg: RunConfig, spec: GroupSpec) -> tuple[list, dict]:
    sys_ = build_lp_system(spec)
    axioms = verify_axioms(sys_, seed=cfg.seed)
    conds = verify_conditions(sys_)
    C1, C2, C3 = sys_.constants
    consts = _info("constants", sys_.name, {"C1": C1, "C2": C2, "C3": C3})
    summary = {
        "C1": C1, "C2": C2, "C3": C3,
        "primal_scales": list(sys_.primal.breakpoints), "dual_scales": list(sys_.dual.breakpoints),
    }
    return [consts, axioms, conds], summary


def point_measure_analyze(cfg: RunConfig, spec: GroupSpec) -> tuple[list, dict]:
    a, b = _exponents_for(cfg, spec.n)
    sys_ = build_lp_system(spec)
    mu = _build_measure(cfg, spec)
    prof = measure_profile(mu, sys_, a, b)
    rep = measure_report(mu, sys_, prof, paraboloid=cfg.measure == "paraboloid", seed=cfg.seed)
    return [rep], {"a": a, "A": prof.A, "b": b, "B": prof.B, "total_mass": mu.total_mass}


def _strategies(cfg: RunConfig, spec: GroupSpec) -> tuple[ScanStrategy, ScanStrategy]:
    universe = spec.size if cfg.truncate is None else min(cfg.truncate, spec.size)
    common = dict(samples=cfg.samples, seed=cfg.seed, structured=cfg.structured,
                  exhaustive_cap=cfg.exhaustive_cap, truncate=cfg.truncate)
    mode = "exhaustive" if universe <= cfg.exhaustive_cap else "random"
    conv_mode = "exhaustive" if universe <= min(cfg.exhaustive_cap, CONV_EXHAUSTIVE_POINTS) else "random"
    return ScanStrategy(mode=mode, **common), ScanStrategy(mode=conv_mode, **common)


def point_verify(cfg: RunConfig, spec: GroupSpec) -> tuple[list, dict]:
    a, b = _exponents_for(cfg, spec.n)
    sys_ = build_lp_system(spec)
    mu = _build_measure(cfg, spec)
    prof = measure_profile(mu, sys_, a, b)
    strat, conv = _strategies(cfg, spec)
    reports = [measure_report(mu, sys_, prof, paraboloid=cfg.measure == "paraboloid", seed=cfg.seed)]
    reports += verify_all(mu, sys_, prof, strat, lorentz_samples=cfg.lorentz_samples, conv_strategy=conv)
    ep = exponent_profile(spec.n, a, b)
    consts = SystemConstants.from_parts(sys_, prof)

    def top(check):
        vals = [r.observed for rep in reports for r in rep.find(check)]
        return max(vals) if vals else None

    norm = next(r.params for rep in reports for r in rep.find("operator_norm_agreement"))
    summary = {
        "size": spec.size, "C1": sys_.C1, "C2": sys_.C2, "C3": sys_.C3, "A": prof.A, "B": prof.B,
        "K1": consts.K1, "a": a, "b": b, "r0": ep.r0,
        "scan_mode": strat.mode, "conv_scan_mode": conv.mode,
        "restriction_scaling_ratio": top("restriction_scaling_ratio"),
        "convolution_scaling_ratio": top("convolution_scaling_ratio"),
        "lorentz_ratio_random_max": top("lorentz_ratio_random_max"),
        "operator_norm_closed": norm["closed_form"], "operator_norm_power": norm["power_iteration"],
    }
    return reports, summary


POINT_FUNCS: dict[str, Callable] = {
    "system-check": point_system_check,
    "measure-analyze": point_measure_analyze,
    "verify": point_verify,
    "scan": point_verify,
}

# keys that affect the result of a single grid point
_RESULT_KEYS = ("measure", "h", "a", "b", "seed", "samples", "exhaustive_cap", "truncate",
                "structured", "lorentz_samples")


def _cache_key(cfg: RunConfig, stage: str, spec: GroupSpec) -> str:
    canon = cfg.canonical()
    payload = {k: canon[k] for k in _RESULT_KEYS}
    if cfg.measure == "weights":
        payload["weights_sha256"] = hashlib.sha256(Path(cfg.weights_file).read_bytes()).hexdigest()
    text = json.dumps([__version__, stage, spec.to_dict(), payload], sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def run_point(command: str, cfg: RunConfig, spec: GroupSpec) -> tuple[dict, float, bool]:
    """One grid point as a JSON-ready dict, its wall time, and whether it came from cache."""
    stage = "verify" if command == "scan" else command
    t0 = time.perf_counter()
    path = None
    if cfg.cache_dir:
        path = Path(cfg.cache_dir) / f"{_cache_key(cfg, stage, spec)}.json"
        if path.exists():
            return json.loads(path.read_text()), time.perf_counter() - t0, True
    reports, summary = POINT_FUNCS[command](cfg, spec)
    result = {
        "group": spec.label,
        "spec": spec.to_dict(),
        "n": spec.n,
        "pass": all(r.passed for r in reports),
        "summary": jsonable(summary),
        "reports": [r.to_dict() for r in reports],
    }
    # round-trip so fresh and cached results serialize identically
    text = json.dumps(result, sort_keys=True)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return json.loads(text), time.perf_counter() - t0, False


def _run_point_star(args):
    return run_point(*args)


# -- report assembly ------------------------------------------------------------------------------


def _csv_rows(command: str, results: list[dict]) -> list[dict]:
    rows = []
    for res in results:
        if command == "scan":
            for key, val in res["summary"].items():
                if isinstance(val, (int, float)) and not isinstance(val, bool):
                    rows.append(record_row(Record.info(key, res["group"], val), res["n"]))
            rows.append(record_row(Record.flag("all_checks", res["group"], res["pass"]), res["n"]))
            continue
        for rep in res["reports"]:
            for r in rep["records"]:
                rec = Record(r["check"], r["system"], r["bound"], r["observed"], r["pass"], r["scale"])
                rows.append(record_row(rec, res["n"]))
    return rows


# output locations do not change results, so they stay out of the report
_OUTPUT_KEYS = ("out", "format", "cache_dir")


def _report_config(cfg: RunConfig) -> dict:
    return {k: v for k, v in cfg.canonical().items() if k not in _OUTPUT_KEYS}


def write_outputs(command: str, cfg: RunConfig, results: list[dict], skipped: list[str], timing: dict) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "seed": cfg.seed,
        "config": jsonable(_report_config(cfg)),
        "pass": all(r["pass"] for r in results),
        "skipped": skipped,
        "results": results,
    }
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = command.replace("-", "_")
    if cfg.format in ("json", "both"):
        (out / f"{stem}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if cfg.format in ("csv", "both"):
        (out / f"{stem}.csv").write_text(write_csv(_csv_rows(command, results)))
    # wall-clock timing lives beside the report so the report bytes stay reproducible
    (out / f"{stem}.timing.json").write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n")
    return doc


def run_grid(command: str, cfg: RunConfig, jobs: int = 1) -> dict:
    if cfg.measure == "weights" and command != "system-check":
        try:
            text = Path(cfg.weights_file).read_text()
            specs = [DualMeasure.from_json(text, size_cap=cfg.size_cap).spec]
        except OSError as exc:
            raise ConfigError(f"cannot read weights file: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc
        skipped: list[str] = []
    else:
        specs, skipped = cfg.group_specs()
    if command != "system-check":
        low = [s for s in specs if s.n < 2]
        skipped += [f"{s.label} (rank < 2)" for s in low]
        specs = [s for s in specs if s.n >= 2]
    if not specs:
        raise ConfigError("the parameter grid is empty")
    if command != "system-check":
        # fail fast on exponent errors before any work starts
        for s in specs:
            _exponents_for(cfg, s.n)

    t0 = time.perf_counter()
    tasks = [(command, cfg, s) for s in specs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_point_star, tasks))
    else:
        outcomes = [_run_point_star(t) for t in tasks]
    results = [o[0] for o in outcomes]
    timing = {
        "total_seconds": time.perf_counter() - t0,
        "points": [{"group": r["group"], "seconds": o[1], "cached": o[2]} for r, o in zip(results, outcomes)],
    }
    for r, o in zip(results, outcomes):
        log.info("%s %s: %s (%.2fs%s)", command, r["group"], "pass" if r["pass"] else "FAIL",
                 o[1], ", cached" if o[2] else "")
    return write_outputs(command, cfg, results, skipped, timing)


# -- exponents ------------------------------------------------------------------------------------


def cmd_exponents(args) -> int:
    try:
        ep = exponent_profile(int(args.n), Fraction(args.a), Fraction(args.b))
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    consts = SystemConstants(args.C1, args.C2, args.C3, args.A, args.B, ep.n, ep.a)
    rows = [(k, v) for k, v in ep.as_dict().items()]
    rows.append(("K1", consts.K1))
    rows.append(("C_nab (user-supplied)", args.C_nab))
    rows.append(("Cbar", cbar_constant(ep, consts, args.C_nab)))
    if args.format == "json":
        print(json.dumps(jsonable(dict(rows)), indent=2))
    else:
        width = max(len(k) for k, _ in rows)
        for k, v in rows:
            print(f"{k:<{width}}  {jsonable(v)}")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--group", action="append", default=[], help="group such as Z/9^2, F_3^2 or F_9^2:1,0,1 (repeatable)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--exhaustive-cap", type=int)
    p.add_argument("--size-cap", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv", "both"))
    p.add_argument("--cache-dir")
    p.add_argument("-a", "--a", dest="a", help="regularity exponent a (default n - 1)")
    p.add_argument("-b", "--b", dest="b", help="decay exponent b (default a)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="any config key")
    p.add_argument("--jobs", type=int, default=1, help="worker processes over grid points")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finrestrict", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("system-check", "ball axioms and constants C1, C2, C3 over the grid"),
        ("measure-analyze", "measure constants A, B and their re-checks"),
        ("verify", "proof-chain bounds, restriction and convolution scans, operator norms"),
        ("scan", "verify every grid point and emit one summary table"),
    ):
        _add_common(sub.add_parser(name, help=help_))
    ex = sub.add_parser("exponents", help="print the exponent profile and constants")
    ex.add_argument("n")
    ex.add_argument("a")
    ex.add_argument("b")
    for c in ("C1", "C2", "C3", "A", "B"):
        ex.add_argument(f"--{c}", type=float, default=1.0)
    ex.add_argument("--C-nab", dest="C_nab", type=float, default=1.0)
    ex.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def _overrides(args) -> dict[str, str]:
    items: dict[str, str] = {}
    for flag in ("seed", "samples", "exhaustive_cap", "size_cap", "out", "format", "cache_dir", "a", "b"):
        val = getattr(args, flag)
        if val is not None:
            items[flag] = str(val)
    for kv in args.set:
        if "=" not in kv:
            raise ConfigError(f"--set expects KEY=VALUE, got {kv!r}")
        k, v = kv.split("=", 1)
        items[k.strip()] = v.strip()
    return items


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")
    if args.command == "exponents":
        return cmd_exponents(args)
    try:
        cfg = load_config(args.config, _overrides(args))
        if args.group:
            cfg = replace(cfg, groups=cfg.groups + tuple(args.group))
        doc = run_grid(args.command, cfg, jobs=max(1, args.jobs))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for res in doc["results"]:
        print(f"{res['group']}: {'pass' if res['pass'] else 'FAIL'}")
    for s in doc["skipped"]:
        print(f"{s}: skipped")
    return EXIT_OK if doc["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
