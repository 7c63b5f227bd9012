"""End-to-end checks of the geo command line: exit codes, determinism, schema."""

import csv
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

GEO = sys.argv[1]
SCHEMA = json.loads(Path(sys.argv[2]).read_text())


def geo(*args):
    return subprocess.run([GEO, *args], capture_output=True, text=True)


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def test_run_validates_against_schema():
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for scenario, point in [("gl:2", None), ("un:2", None), ("su:2", None), ("pair:3", None),
                            ("kl:binary", "0.5"), ("kl:categorical3", "0.2,0.5"),
                            ("bregman:gaussian-natural", None), ("sphere:3", None),
                            ("fubini-study:2", None)]:
        args = ["run", "--scenario", scenario] + (["--point", point] if point else [])
        p = geo(*args)
        check(p.returncode in (0, 3), f"{scenario}: exit {p.returncode} {p.stderr}")
        validator.validate(json.loads(p.stdout))


def test_run_is_byte_identical():
    with tempfile.TemporaryDirectory() as d:
        a, b = Path(d, "a.json"), Path(d, "b.json")
        for out in (a, b):
            p = geo("run", "--scenario", "kl:categorical3", "--point", "0.3,0.3", "--seed", "11",
                    "--alpha", "0.25", "--alpha", "-0.25", "--out", str(out))
            check(p.returncode == 0, p.stderr)
        check(a.read_bytes() == b.read_bytes(), "outputs differ")
        doc = json.loads(a.read_text())
        check(doc["seed"] == 11 and doc["alpha"] == [0.25, -0.25], doc)


def test_exit_codes():
    check(geo("run", "--scenario", "nope").returncode == 2, "unknown scenario")
    check(geo("run", "--scenario", "kl:binary", "--point", "1.5").returncode == 2, "out of domain")
    check(geo("run", "--scenario", "kl:binary", "--point", "x").returncode == 2, "bad point")
    check(geo("run").returncode == 2, "missing option")
    check(geo("run", "--scenario", "gl:2", "--method", "spline").returncode == 2, "bad method")
    check(geo("verify", "bogus").returncode == 2, "bad suite")
    check(geo("run", "--scenario", "fubini-study:2").returncode == 3, "degenerate metric")
    check(geo("verify", "higher").returncode == 0, "higher suite")
    check(geo("--help").returncode == 0, "help")


def test_perturbed_duality_fails():
    p = geo("verify", "duality", "--perturb-dual", "--format", "json")
    check(p.returncode == 1, f"exit {p.returncode}")
    worst = max(c["residual"] for c in json.loads(p.stdout) if "nabla^F*)" in c["name"])
    check(worst > 1e-3, worst)


def test_scan_binary_grid():
    p = geo("scan", "--scenario", "kl:binary", "--grid", "0.1:0.9:9")
    check(p.returncode == 0, p.stderr)
    rows = list(csv.DictReader(io.StringIO(p.stdout)))
    check(len(rows) == 9, len(rows))
    for r in rows:
        th = float(r["x1"])
        check(abs(float(r["g11"]) - 1 / (th * (1 - th))) < 1e-5, r)
        check(r["error"] == "", r)


def test_scan_reports_failed_points():
    p = geo("scan", "--scenario", "kl:binary", "--point", "0.4", "--point", "1.4", "--point", "0.6")
    check(p.returncode == 0, p.stderr)
    rows = list(csv.DictReader(io.StringIO(p.stdout)))
    check([r["x1"] for r in rows] == ["0.4", "1.4", "0.6"], rows)
    check(rows[1]["error"] and rows[1]["g11"] == "", rows[1])


def test_scan_fubini_study_rank():
    p = geo("scan", "--scenario", "fubini-study:2", "--samples", "5", "--seed", "3")
    rows = list(csv.DictReader(io.StringIO(p.stdout)))
    check({r["g_rank"] for r in rows} == {"2"}, rows)


def test_scan_sphere_metric():
    p = geo("scan", "--scenario", "sphere:2", "--samples", "5", "--format", "json")
    for row in json.loads(p.stdout):
        for i, line in enumerate(row["g"]):
            for j, v in enumerate(line):
                check(abs(v - (i == j)) < 1e-6, row["g"])


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print("ok", t.__name__)
