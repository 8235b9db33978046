import csv
import io
import json
from math import pi, sqrt

import jsonschema
import numpy as np
import pytest

from aheinstein.cli import RunConfig, main, run, sweep
from aheinstein.cli import _schema as load_schema


def invoke(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def csv_rows(text):
    return list(csv.reader(io.StringIO(text, newline="")))


def test_blackhole_toral(capsys):
    status, out, _ = invoke(capsys, "blackhole", "--c", "0", "--m", "0.5")
    data = json.loads(out)
    assert status == 0
    assert data["r_plus"] == pytest.approx(1.0, abs=1e-12)
    assert data["beta"] == pytest.approx(4 * pi / 3, rel=1e-12)
    assert data["admissible"] and data["competitors"]


def test_match_boundary_round_sphere(capsys):
    status, out, _ = invoke(capsys, "match-boundary", "--c", "1", "--beta", "3.14159265")
    data = json.loads(out)
    assert status == 0
    assert data["black_hole_count"] == 2
    assert data["masses"] == pytest.approx([5 / 27, 1.0], abs=1e-7)
    assert "R3xS1" in [m["topology"] for m in data["competitors"]]


def test_large_period_has_only_the_quotient(capsys):
    status, out, _ = invoke(capsys, "match-boundary", "--c", "1", "--beta", "4.0")
    data = json.loads(out)
    assert status == 0
    assert data["black_hole_count"] == 0
    assert [m["topology"] for m in data["competitors"]] == ["R3xS1"]


def test_no_solution_in_five_dimensions(capsys):
    # in dimension 5 the largest black-hole period is pi / sqrt 2
    status, out, _ = invoke(capsys, "match-boundary", "--n", "5", "--c", "1", "--beta", "5.0")
    assert status == 3
    assert json.loads(out)["black_hole_count"] == 0


@pytest.mark.parametrize("argv", [
    ["blackhole", "--c", "2", "--m", "1"],
    ["blackhole", "--c", "1"],
    ["blackhole", "--c", "-1", "--m", "-1"],
    ["renvol", "--c", "1", "--m", "1", "--tol", "window_gap=1e-9"],
    ["renvol", "--c", "1", "--m", "1", "--tol", "no_such_key=1"],
    ["bach"],
    ["dehn", "fill3d"],
    ["dehn", "fill3d", "--sigma", "2,4"],
    ["sweep", "--kind", "beta", "--start", "1", "--stop", "2", "--count", "1"],
])
def test_invalid_input_exits_2(capsys, argv):
    status, out, err = invoke(capsys, *argv)
    assert status == 2
    assert out == "" and "invalid input" in err


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"subcommand": "blackhole", "parameters": {"c": 1, "m": 1},
                                "colour": "blue"}))
    assert invoke(capsys, "--config", str(path))[0] == 2
    path.write_text(json.dumps({"subcommand": "blackhole", "parameters": {"c": 1, "mass": 1}}))
    assert invoke(capsys, "--config", str(path))[0] == 2


def test_config_file_matches_flags(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"subcommand": "blackhole", "parameters": {"c": -1, "m": 0.2}}))
    _, from_file, _ = invoke(capsys, "--config", str(path))
    _, from_flags, _ = invoke(capsys, "blackhole", "--c", "-1", "--m", "0.2")
    assert from_file == from_flags


def test_loosened_tolerance_is_accepted(capsys):
    status, out, _ = invoke(capsys, "fg", "--c", "0", "--m", "1", "--tol", "trace_g3=1e-3")
    assert status == 0 and json.loads(out)["pass"]


@pytest.mark.parametrize("argv,schema", [
    (["blackhole", "--c", "1", "--m", "1"], "blackhole"),
    (["blackhole", "--n", "5", "--c", "-1", "--m", "0.3"], "blackhole"),
    (["match-boundary", "--c", "0", "--beta", "2.0"], "match_boundary"),
    (["fg", "--family", "ball", "--order", "4"], "fg_expansion"),
    (["renvol", "--c", "0", "--m", "1", "--gauss-bonnet"], "renvol"),
    (["dehn", "fill3d", "--sigma", "1,0", "--window", "0.02,0.3"], "dehn"),
    (["dehn", "fill4d", "--sigma", "1,2", "--beta2", "1.0"], "dehn"),
    (["dehn", "enumerate", "--L-max", "5"], "dehn_enumerate"),
    (["bach", "--check-polynomials", "--draws", "10"], "bach"),
    (["sweep", "--kind", "masses", "--start", "1", "--stop", "4", "--count", "4",
      "--format", "json"], "sweep"),
])
def test_json_validates_against_schema(capsys, argv, schema):
    status, out, _ = invoke(capsys, *argv)
    assert status == 0
    data = json.loads(out)
    jsonschema.validate(data, load_schema(schema))
    assert data["schema"].startswith(schema + "/")


def test_shipped_schemas_are_the_repo_copies():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "schemas"
    for path in root.glob("*.schema.json"):
        assert json.loads(path.read_text()) == load_schema(path.name.split(".")[0])


def test_reruns_are_byte_identical(tmp_path, capsys):
    argv = ["dehn", "fill4d", "--sigma", "3,1", "--beta2", "2.0", "--window", "0.1,0.4"]
    texts = []
    for name in ("a.json", "b.json"):
        assert invoke(capsys, *argv, "--output", str(tmp_path / name))[0] == 0
        texts.append((tmp_path / name).read_bytes())
    assert texts[0] == texts[1]
    bach = [invoke(capsys, "bach", "--check-polynomials", "--draws", "5", "--seed", "9")[1]
            for _ in range(2)]
    assert bach[0] == bach[1]


def test_output_file_and_summary(tmp_path, capsys):
    target = tmp_path / "sub" / "bh.json"
    status, out, _ = invoke(capsys, "blackhole", "--c", "1", "--m", "1", "-o", str(target))
    assert status == 0
    assert out.count("\n") == 1 and "r_plus=1" in out
    assert json.loads(target.read_text())["r_plus"] == pytest.approx(1.0)
    assert [p.name for p in target.parent.iterdir()] == ["bh.json"]


def test_output_directory_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("AHEINSTEIN_OUTPUT_DIR", str(tmp_path))
    assert invoke(capsys, "blackhole", "--c", "0", "--m", "2", "-o", "toral.json")[0] == 0
    assert json.loads((tmp_path / "toral.json").read_text())["m"] == 2


def test_csv_is_crlf_with_full_precision(capsys):
    status, out, _ = invoke(capsys, "sweep", "--kind", "beta", "--c", "0",
                            "--start", "1", "--stop", "2", "--count", "3")
    assert status == 0
    assert out.endswith("\r\n") and out.count("\r\n") == 4
    rows = csv_rows(out)
    assert rows[0] == ["r_plus", "beta", "m"]
    # 4 pi / 3 at r_plus = 1 for the toral family
    assert rows[1][1] == format(4 * pi / 3, ".17g")


def test_beta_sweep_round_sphere(capsys):
    _, out, _ = invoke(capsys, "sweep", "--kind", "beta", "--c", "1",
                       "--start", "0.1", "--stop", "3", "--count", "100")
    rows = np.array(csv_rows(out)[1:], dtype=float)
    assert len(rows) == 100
    peak = int(np.argmax(rows[:, 1]))
    assert 0 < peak < 99
    assert abs(rows[peak, 0] - 1 / sqrt(3)) < (3 - 0.1) / 99
    assert np.all(np.diff(rows[:peak + 1, 1]) > 0) and np.all(np.diff(rows[peak:, 1]) < 0)


def test_beta_sweep_hyperbolic_is_decreasing(capsys):
    _, out, _ = invoke(capsys, "sweep", "--kind", "beta", "--c", "-1",
                       "--start", "0.6", "--stop", "5", "--count", "50")
    beta = np.array(csv_rows(out)[1:], dtype=float)[:, 1]
    assert np.all(np.isfinite(beta)) and np.all(np.diff(beta) < 0)


def test_renvol_sweep_is_finite(capsys):
    _, out, _ = invoke(capsys, "sweep", "--kind", "renvol", "--start", "0.25", "--stop", "4",
                       "--count", "16")
    rows = np.array(csv_rows(out)[1:], dtype=float)
    assert rows.shape == (16, 3)
    assert np.all(np.isfinite(rows))
    # the toral family at fixed torus scales like m^(2/3)
    want = -(4 * pi / 9) * 2 ** (-1 / 3) * rows[:, 0] ** (2 / 3)
    assert np.allclose(rows[:, 1], want, rtol=1e-6)


def test_parallel_sweep_keeps_input_order():
    params = {"kind": "beta", "c": 1, "start": 0.2, "stop": 2.0, "count": 9}
    serial = sweep(RunConfig("sweep", params))
    parallel = sweep(RunConfig("sweep", {**params, "jobs": 3}))
    assert serial == parallel


def test_renvol_csv_columns(capsys):
    status, out, _ = invoke(capsys, "renvol", "--c", "-1", "--m", "0", "--gauss-bonnet",
                            "--format", "csv")
    assert status == 0
    header, row = csv_rows(out)
    assert header == ["family", "c", "m", "v0", "v2", "V_ren", "weyl_energy", "chi", "gap_3_7"]
    assert row[:3] == ["blackhole", "-1", "0"] and row[7] == "-2"


def test_csv_refused_where_not_tabular(capsys):
    assert invoke(capsys, "blackhole", "--c", "1", "--m", "1", "--format", "csv")[0] == 2


def test_dehn_enumerate_csv(capsys):
    _, out, _ = invoke(capsys, "dehn", "enumerate", "--L-max", "2", "--format", "csv")
    rows = csv_rows(out)
    assert rows[0] == ["p", "q", "length"]
    # on the unit square: (1,0), (0,1), (1,1), (1,-1) and their negatives are one class each
    assert len(rows) - 1 == 4


def test_run_reports_summary_to_given_streams(tmp_path):
    out, err = io.StringIO(), io.StringIO()
    cfg = RunConfig("blackhole", {"c": 1, "m": 1.0}, output=str(tmp_path / "x.json"))
    assert run(cfg, out, err) == 0
    assert out.getvalue().startswith("blackhole:") and err.getvalue() == ""


def test_verify_subset(capsys):
    status, out, _ = invoke(capsys, "verify", "--only", "2,3")
    data = json.loads(out)
    assert status == 0 and data["passed"]
    assert sorted(r["number"] for r in data["results"]) == [2, 3]
