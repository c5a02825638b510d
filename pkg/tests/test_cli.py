import csv
import io
import json
import subprocess
import sys

import pytest

from admissible.cli import main

CLASSIFY = ["classify", "--catalog", "paper_counterexample", "--domain", "ball:2", "--vertex", "(1,0)",
            "--alphas", "1.5,3,6", "--omit-samples", "20000"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_counterexample_report(capsys):
    code, out, _ = run(CLASSIFY, capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["tool"] == "admissible" and rep["schema"] == 1 and rep["command"] == "classify"
    res = rep["result"]
    assert res["normal_limit"]["value"] == [0.0, 0.0]
    assert res["admissible"]["status"] == "fails"
    assert res["admissible"]["witness"]["path"]["kind"] == "paper_parabola"
    assert res["criterion_t1"]["status"] == "violated"
    assert rep["config"]["seed"] == 0


def test_classify_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(CLASSIFY + ["--out", str(a)]) == 0
    assert main(CLASSIFY + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_classify_inv_normal_text(capsys):
    code, out, _ = run(["classify", "--catalog", "inv_normal", "--alphas", "1,2", "--omit-samples", "5000",
                        "--format", "text"], capsys)
    assert code == 0
    assert "admissible: holds inf" in out
    assert "lindelof: predicts_admissible" in out


def test_classify_function_text(capsys):
    code, out, _ = run(["classify", "--function", "z2^3/(1 - z1)", "--alphas", "2", "--no-theorems"], capsys)
    assert code == 0 and json.loads(out)["result"]["admissible"]["status"] == "holds"


@pytest.mark.parametrize("argv", [
    ["classify", "--function", "z1 +", "--alphas", "2"],
    ["classify", "--catalog", "nope"],
    ["classify", "--function", "z3", "--domain", "ball:2"],
    ["classify", "--catalog", "inv_normal", "--alphas", ""],
    ["classify", "--catalog", "inv_normal", "--domain", "torus:2"],
    ["region", "--region", "koranyi:beta=2@xi=(1,0)"],
    ["frobnicate"],
])
def test_input_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2


def test_geometry_error_exit_3(capsys):
    code, _, err = run(["classify", "--catalog", "inv_normal", "--vertex", "(0.5,0)"], capsys)
    assert code == 3 and "error" in err


def test_region_grid_csv(capsys):
    code, out, _ = run(["region", "--domain", "ball:1", "--vertex", "(1)", "--region", "stolz:alpha=2@xi=(1)",
                        "--grid", "100"], capsys)
    assert code == 0
    assert "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["re_z1", "im_z1", "stolz:alpha=2@xi=(1)"]
    assert len(rows) == 1 + 10_000
    assert {r[2] for r in rows[1:]} == {"0", "1"}
    # 17 significant digits make the coordinates round-trip exactly
    assert all(float(repr(float(r[0]))) == float(r[0]) for r in rows[1:50])


def test_region_sample_rows_are_members(capsys):
    code, out, _ = run(["region", "--region", "koranyi:alpha=2@xi=(1,0)", "--sample", "0.001",
                        "--count", "50", "--seed", "3"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert len(rows) == 50 and all(r[-1] == "1" for r in rows)


def test_region_json(capsys):
    code, out, _ = run(["region", "--grid", "20", "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["points"] == 400


def test_growth_counterexample(capsys):
    code, out, _ = run(["growth", "--catalog", "paper_counterexample"], capsys)
    rep = json.loads(out)["result"]
    assert code == 0
    assert rep["tangential"]["fit"]["exponent"] == pytest.approx(-0.5, abs=0.05)
    assert rep["prediction"] == "not_admissible"


def test_growth_tangential_cubed_text(capsys):
    code, out, _ = run(["growth", "--catalog", "tangential_cubed", "--format", "text"], capsys)
    assert code == 0 and "prediction: admissible" in out


def test_verify_all_pass(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    assert out.strip().splitlines()[-1] == "19/19 passed"


def test_verify_filter(capsys):
    code, out, _ = run(["verify", "--filter", "chains"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[-1] == "3/3 passed"
    assert all("chains" in line for line in lines[:-1])


def test_verify_detects_bad_frame(capsys):
    code, out, _ = run(["verify", "--filter", "geometry", "--inject-bad-frame"], capsys)
    assert code == 4 and "FAIL" in out


def test_verify_json_deterministic(capsys):
    _, a, _ = run(["verify", "--format", "json", "--filter", "regions"], capsys)
    _, b, _ = run(["verify", "--format", "json", "--filter", "regions"], capsys)
    assert a == b and json.loads(a)["result"]["failed"] == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "admissible", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout
