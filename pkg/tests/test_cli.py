import cmath
import csv
import hashlib
import json
import time

import pytest

from finrestrict.cli import main
from finrestrict.groups import GroupSpec
from finrestrict.measures import paraboloid_measure
from finrestrict.report import CSV_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_system_check_fields(tmp_path, capsys):
    code, out, _ = run(capsys, "system-check", "--group", "F_3^2", "--group", "F_5^2", "--out", str(tmp_path))
    assert code == 0 and "F_3^2: pass" in out
    doc = json.loads((tmp_path / "system_check.json").read_text())
    assert doc["schema_version"] == 1 and doc["command"] == "system-check" and doc["seed"] == 0
    for res in doc["results"]:
        s = res["summary"]
        assert (s["C1"], s["C2"], s["C3"]) == pytest.approx((1, 1, 1), abs=1e-9)
    assert (tmp_path / "system_check.timing.json").exists()
    with open(tmp_path / "system_check.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert {"C1", "nesting", "R"} <= {r["quantity"] for r in rows}


def test_system_check_composite(tmp_path, capsys):
    code, out, _ = run(capsys, "system-check", "--group", "Z/6^1", "--out", str(tmp_path), "--format", "json")
    assert code == 0
    doc = json.loads((tmp_path / "system_check.json").read_text())
    assert doc["results"][0]["summary"]["C1"] == pytest.approx(4 / 3)
    assert not (tmp_path / "system_check.csv").exists()


def test_config_errors_exit_two(tmp_path, capsys):
    code, _, err = run(capsys, "system-check", "--set", "p=4", "--out", str(tmp_path))
    assert code == 2 and "p must be an odd prime" in err
    code, _, err = run(capsys, "verify", "--group", "Z/9^2", "-a", "1", "-b", "3/2", "--out", str(tmp_path))
    assert code == 2
    code, _, err = run(capsys, "verify", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path))
    assert code == 2
    code, _, err = run(capsys, "verify", "--out", str(tmp_path))
    assert code == 2 and "empty" in err


def test_measure_analyze(tmp_path, capsys):
    code, _, _ = run(capsys, "measure-analyze", "--group", "Z/3^2", "--group", "F_3^2", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "measure_analyze.json").read_text())
    for res in doc["results"]:
        assert res["summary"]["A"] == pytest.approx(1.0) and res["summary"]["B"] == pytest.approx(1.0)


def test_measure_analyze_weights_file(tmp_path, capsys):
    mu = paraboloid_measure(GroupSpec.cyclic(5, 2))
    good = tmp_path / "good.json"
    good.write_text(mu.to_json())
    code, _, _ = run(capsys, "measure-analyze", "--set", "measure=weights", "--set", f"weights_file={good}", "--out", str(tmp_path))
    assert code == 0
    d = json.loads(mu.to_json())
    d["weights"][next(iter(d["weights"]))] = -0.5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, _, err = run(capsys, "measure-analyze", "--set", "measure=weights", "--set", f"weights_file={bad}", "--out", str(tmp_path))
    assert code == 2 and "error" in err


def test_measure_analyze_graph(tmp_path, capsys):
    code, _, _ = run(
        capsys, "measure-analyze", "--group", "Z/7^2", "--set", "measure=graph", "--set", "h=w1^3", "--out", str(tmp_path)
    )
    summary = json.loads((tmp_path / "measure_analyze.json").read_text())["results"][0]["summary"]
    assert code == 0 and summary["total_mass"] == pytest.approx(1.0)
    # every nonzero x has norm 7, so B = sqrt(7) max |(1/7) sum_w e((x1 w + x2 w^3)/7)|
    sums = [
        abs(sum(cmath.exp(2j * cmath.pi * (x1 * w + x2 * w**3) / 7) for w in range(7))) / 7
        for x1 in range(7) for x2 in range(7) if (x1, x2) != (0, 0)
    ]
    assert summary["B"] == pytest.approx(7**0.5 * max(sums), rel=1e-9)


def test_verify_exhaustive_z3(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--group", "Z/3^2", "--out", str(tmp_path), "--set", "lorentz_samples=20")
    assert code == 0
    res = json.loads((tmp_path / "verify.json").read_text())["results"][0]
    assert res["summary"]["scan_mode"] == "exhaustive" and res["summary"]["conv_scan_mode"] == "exhaustive"
    assert res["summary"]["restriction_scaling_ratio"] > 0
    assert res["summary"]["operator_norm_closed"] == pytest.approx(3.0)


def test_verify_deterministic_and_cached(tmp_path, capsys):
    args = ["verify", "--group", "Z/9^2", "--seed", "42", "--samples", "2000", "--set", "lorentz_samples=20"]
    cache = tmp_path / "cache"
    assert run(capsys, *args, "--out", str(tmp_path / "a"), "--cache-dir", str(cache))[0] == 0
    t0 = time.perf_counter()
    assert run(capsys, *args, "--out", str(tmp_path / "b"), "--cache-dir", str(cache))[0] == 0
    assert time.perf_counter() - t0 < 1.0
    assert run(capsys, *args, "--out", str(tmp_path / "c"))[0] == 0
    ha, hb, hc = (digest(tmp_path / d / "verify.json") for d in "abc")
    assert ha == hb == hc
    timing = json.loads((tmp_path / "b" / "verify.timing.json").read_text())
    assert timing["points"][0]["cached"] is True
    # a different seed changes the report
    assert run(capsys, *args[:-4], "--seed", "43", "--samples", "2000", "--set", "lorentz_samples=20", "--out", str(tmp_path / "d"))[0] == 0
    assert digest(tmp_path / "d" / "verify.json") != ha


def test_scan_summary_csv(tmp_path, capsys):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("p = 3\nalpha = 1-2\nq = 3\nsamples = 300\nlorentz_samples = 10\n")
    code, out, _ = run(capsys, "scan", "--config", str(cfg), "--out", str(tmp_path), "--jobs", "2")
    assert code == 0
    doc = json.loads((tmp_path / "scan.json").read_text())
    assert [r["group"] for r in doc["results"]] == ["Z/3^2", "Z/9^2", "F_3^2"]
    with open(tmp_path / "scan.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {"K1", "operator_norm_closed", "all_checks"} <= {r["quantity"] for r in rows}


def test_rank_one_skipped_for_measures(tmp_path, capsys):
    code, out, _ = run(capsys, "measure-analyze", "--group", "Z/5^1", "--group", "Z/5^2", "--out", str(tmp_path))
    assert code == 0 and "Z/5^1 (rank < 2): skipped" in out


def test_exponents(capsys):
    code, out, _ = run(capsys, "exponents", "2", "1", "1")
    assert code == 0
    table = dict(line.split(None, 1) for line in out.splitlines() if not line.startswith("C_nab"))
    assert table["r0"].strip() == "6/5" and table["theta"].strip() == "2/3"
    assert table["sigma"].strip() == "12/11" and table["tau"].strip() == "4"
    assert table["conv_r0"].strip() == "3/2" and table["conv_s0"].strip() == "3"
    assert "C_nab (user-supplied)" in out
    code, out, _ = run(capsys, "exponents", "3", "2", "2", "--format", "json")
    assert code == 0 and json.loads(out)["r0"] == "4/3"
    code, _, err = run(capsys, "exponents", "2", "1", "1.5")
    assert code == 2 and "error" in err
