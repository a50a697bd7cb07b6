import csv
import io
import json
import os
import subprocess
import sys

import pytest

from prescurv.errors import SchemaError
from prescurv.scenarios import (CATALOG, catalog_scenario, emit, load_scenario, parse_scenario,
                                run, scenario_to_dict, to_csv, to_json)
from prescurv.scenarios.cli import main

SPHERE_F = "2/(1+x1^2+x2^2+x3^2)^4"


def write(tmp_path, doc, name="scn.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def minimal_verify():
    return {"task": "verify", "n": 3, "tensor": ["4*x1^2-2", "-2*x1^2", "-2*x1^2"],
            "phi": "1/(1+x1^2)"}


def test_defaults(tmp_path):
    scn = load_scenario(write(tmp_path, minimal_verify()))
    assert scn.grid.center == (0.0, 0.0, 0.0)
    assert scn.grid.half_width == 2 and scn.grid.points_per_axis == 9
    t = scn.tolerances
    assert (t.accept, t.reject, t.quadrature) == (1e-8, 1e-4, 1e-10)
    assert scn.background == "1"


@pytest.mark.parametrize("patch, path", [
    ({"colour": 1}, "colour"),
    ({"grid": {"points": 9}}, "grid.points"),
    ({"grid": {"points_per_axis": 4}}, "grid"),
    ({"tolerances": {"accept": 1e-3, "reject": 1e-4}}, "tolerances"),
    ({"task": "fly"}, "task"),
    ({"tensor": ["x1", "x2"]}, "tensor"),
    ({"tensor": ["x4", "1", "1"]}, "tensor[0]"),
    ({"h": "x1"}, "h"),
    ({"phi": None}, "phi"),
    ({"schema_version": 2}, "schema_version"),
])
def test_schema_errors_locate_the_key(patch, path):
    doc = minimal_verify()
    doc.update(patch)
    with pytest.raises(SchemaError) as info:
        parse_scenario(doc)
    assert info.value.path.startswith(path)


def test_unreadable_file(tmp_path):
    with pytest.raises(SchemaError, match="cannot read"):
        load_scenario(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_scenario(bad)


def test_catalog_loading():
    assert catalog_scenario("rational-complete").task == "solve"
    scn = parse_scenario({"example_id": "rational-complete"})
    assert scn.task == "example" and scn.n == 3
    with pytest.raises(SchemaError):
        parse_scenario({"example_id": "rational-complete", "phi": "1"})
    with pytest.raises(SchemaError):
        parse_scenario({"example_id": "no-such-example"})


def test_scenario_dict_round_trip():
    scn = parse_scenario(minimal_verify())
    assert parse_scenario(scenario_to_dict(scn)) == scn


def test_verify_generated_example():
    scn = parse_scenario({"task": "verify", "n": 3, "tensor": {"h": "2*x1", "k": 1, "C": 1.0},
                          "phi": "exp(-x1^2)", "grid": {"axes": [1]}})
    rep = run(scn)
    assert rep.verdict == "OK"
    assert max(s["max"] for s in rep.as_dict()["residuals"].values()) <= 1e-10


def test_solve_separable_report():
    rep = run(parse_scenario({"task": "solve", "n": 3,
                              "tensor": ["exp(x1)", "exp(x2)", "exp(x3)"]}))
    d = rep.as_dict()
    assert d["verdict"] == "NONEXISTENT"
    assert d["parameters"]["witness"] == "separable"


def test_classify_report():
    rep = run(parse_scenario({"task": "classify", "n": 3, "tensor": [SPHERE_F] * 3}))
    p = rep.as_dict()["parameters"]
    assert rep.verdict == "OK"
    fam = p["quadratic_family"]
    assert abs(fam["a"] - 1) <= 1e-8 and abs(fam["c"] - 1) <= 1e-8 and max(map(abs, fam["b"])) <= 1e-8
    assert p["singular_set"]["kind"] == "empty"


def test_library_errors_become_error_reports():
    rep = run(parse_scenario({"task": "curvature", "n": 3, "phi": "x1"}))
    assert rep.verdict == "ERROR"
    assert rep.error["type"] == "SingularMetric"


def test_csv_layout():
    rep = run(parse_scenario({"task": "curvature", "n": 3, "phi": "1 + x1^2 + x2^2 + x3^2",
                              "grid": {"points_per_axis": 3}}))
    rows = list(csv.reader(io.StringIO(to_csv(rep))))
    assert rows[0] == ["x1", "x2", "x3", "scalar", "ric_11", "ric_22", "ric_33",
                       "K_12", "K_13", "K_23"]
    assert len(rows) == 28
    for r in rows[1:]:
        assert all(abs(float(v) - 4) <= 1e-12 for v in r[-3:])
    with pytest.raises(ValueError):
        to_csv(run(parse_scenario(minimal_verify())))


def test_json_recovered_scale():
    rep = run(parse_scenario({"task": "solve", "n": 3, "tensor": {"h": "2*x1/(1+x1^2)", "k": 1,
                                                                   "C": 1.0},
                              "grid": {"axes": [1]}}))
    d = json.loads(to_json(rep))
    assert d["verdict"] == "SOLUTION"
    assert d["parameters"]["recovered_C"] == 1.0


def test_json_key_order():
    d = json.loads(to_json(run(parse_scenario(minimal_verify()))))
    assert list(d) == ["report_version", "task", "example_id", "verdict", "parameters",
                       "residuals", "checks", "discrepancies", "notes", "error", "scenario", "table"]


def test_emit_writes_file(tmp_path):
    rep = run(parse_scenario(minimal_verify()))
    out = tmp_path / "r.json"
    text = emit(rep, "json", out)
    assert out.read_text() == text
    with pytest.raises(OSError):
        emit(rep, "json", tmp_path / "missing" / "r.json")


@pytest.mark.parametrize("key", sorted(CATALOG))
def test_catalog_entries_hold(key):
    rep = run(parse_scenario({"example_id": key}))
    assert rep.verdict == "OK", [c for c in rep.checks if not c["ok"]]


def test_catalog_keeps_displayed_and_corrected_formulas():
    entry = CATALOG["hyperbolic-gaussian"]
    assert any(f.corrected for f in entry.formulas)
    rep = run(parse_scenario({"example_id": "hyperbolic-gaussian"})).as_dict()
    kinds = {d["kind"] for d in rep["discrepancies"]}
    assert "pairing" in kinds or any("pairing" in str(d) for d in rep["discrepancies"])


# CLI

@pytest.mark.parametrize("doc, task, code", [
    (minimal_verify(), "verify", 0),
    ({"task": "solve", "n": 3, "tensor": ["exp(x1)", "exp(x2)", "exp(x3)"]}, "solve", 2),
    ({"task": "classify", "n": 3, "tensor": ["1", "1", "1"]}, "classify", 2),
    ({"task": "curvature", "n": 3, "phi": "x1"}, "curvature", 1),
])
def test_cli_exit_codes(tmp_path, doc, task, code):
    assert main([task, "--scenario", str(write(tmp_path, doc)), "--quiet"]) == code


def test_cli_indeterminate(tmp_path):
    doc = {"task": "solve", "n": 3,
           "tensor": ["4*x1^2-2", "-2*x1^2*(1+1e-6*x2^2)", "-2*x1^2"]}
    assert main(["solve", "--scenario", str(write(tmp_path, doc)), "--quiet"]) == 3


def test_cli_bad_input(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["verify", "--scenario", str(p), "--quiet"]) == 1
    assert main(["verify", "--quiet"]) == 1
    with pytest.raises(SystemExit):
        main(["verify", "--scenario", str(p), "--grid-points", "4"])


def test_cli_overrides_and_output(tmp_path):
    out = tmp_path / "r.json"
    scn = write(tmp_path, minimal_verify())
    assert main(["verify", "--scenario", str(scn), "--grid-points", "5", "--tol-accept", "1e-9",
                 "--out", str(out), "--quiet"]) == 0
    d = json.loads(out.read_text())
    assert d["scenario"]["grid"]["points_per_axis"] == 5
    assert d["scenario"]["tolerances"]["accept"] == 1e-9


def test_cli_example_by_id(capsys):
    assert main(["example", "--id", "sphere-family"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "OK"
    assert main(["example", "--list"]) == 0


def _cli_bytes(args, threads):
    env = dict(os.environ, PRESCURV_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "prescurv", *args], env=env, check=False,
                          capture_output=True).stdout


def test_reports_identical_across_thread_counts(tmp_path):
    doc = {"task": "solve", "n": 3, "tensor": [SPHERE_F] * 3, "grid": {"points_per_axis": 7}}
    scn = str(write(tmp_path, doc))
    outs = {_cli_bytes(["solve", "--scenario", scn], t) for t in (1, 1, 4)}
    assert len(outs) == 1 and outs.pop()
