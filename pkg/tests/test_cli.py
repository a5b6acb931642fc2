"""Golden-file tests for every CLI verb.

Set POSMAP_REGEN_GOLDEN=1 to rewrite the expected outputs after an
intentional format change; review the diff before committing.
"""
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from posmap import jsonio
from posmap.cli import run
from posmap.stateclasses import flip

GOLDEN = Path(__file__).parent / "golden"
INPUTS = GOLDEN / "inputs"

# (name, argv, exit code)
CASES = [
    ("convert_choi_transpose2", ["convert", "--to", "choi", "transpose2.json"], 0),
    ("convert_kraus_pinching2", ["convert", "--to", "kraus", "pinching2.json"], 0),
    ("convert_aform_gm_identity2",
     ["convert", "--to", "aform", "--basis", "gell_mann_with_identity", "identity2.json"], 0),
    ("convert_transfer_fourier_identity2",
     ["convert", "--to", "transfer", "--basis", "fourier_diagonal_plus_offdiag", "identity2.json"], 0),
    ("convert_kraus_transpose2", ["convert", "--to", "kraus", "transpose2.json"], 1),
    ("check_cp_transpose2", ["check", "--cp", "transpose2.json"], 0),
    ("check_all_werner2", ["check", "werner2.json"], 0),
    ("check_sample_transpose3", ["check", "--positive-sample", "200", "--seed", "1", "transpose3.json"], 0),
    ("spectrum_identity2", ["spectrum", "identity2.json"], 0),
    ("spectrum_transpose3", ["spectrum", "transpose3.json"], 0),
    ("decompose_pinching2", ["decompose", "--biorth", "pinching2.json"], 0),
    ("decompose_jordan2", ["decompose", "--biorth", "jordan2.json"], 1),
    ("gen_werner2", ["gen", "werner", "2"], 0),
    ("gen_isotropic2", ["gen", "isotropic", "2"], 0),
    ("gen_pinching3", ["gen", "pinching", "pinching_p3.json"], 0),
    ("gen_ball3", ["gen", "ball", "3"], 0),
    ("gen_example3", ["gen", "example", "--alpha", "0.5,0.3,0.2", "--beta", "beta3.json"], 0),
    ("gen_example_bad_alpha", ["gen", "example", "--alpha", "0.5,0.6,0.2", "--beta", "beta3.json"], 1),
    ("member_ball_pure3", ["member", "--ball", "3", "pure3.json"], 0),
    ("member_ball_mixed3", ["member", "--ball", "3", "mixed3.json"], 0),
    ("member_projection_state00", ["member", "--projection", "werner2.json", "state00.json"], 0),
    ("witness_pure3", ["witness", "--ball", "3", "pure3.json"], 0),
    ("witness_mixed3", ["witness", "--ball", "3", "mixed3.json"], 1),
    ("demo_example_map", ["demo", "example-map", "--d", "3", "--seed", "7"], 0),
    ("schema_bad_entry", ["spectrum", "bad_entry.json"], 2),
    ("schema_bad_repr", ["spectrum", "bad_repr.json"], 2),
    ("schema_not_json", ["spectrum", "not_json.json"], 2),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(INPUTS)
    try:
        code = run(argv, stdout=out, stderr=err)
    finally:
        os.chdir(cwd)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name,argv,expected_code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, expected_code):
    code, out, _ = invoke(argv)
    assert code == expected_code
    path = GOLDEN / f"{name}.json"
    if os.environ.get("POSMAP_REGEN_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")
    # byte-identical rerun
    assert invoke(argv)[1] == out


def load(name):
    return json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))


def test_golden_contents_are_sane():
    spec = load("spectrum_identity2")
    assert spec["eigenvalues"] == [[1.0, 0.0]] * 4
    assert spec["pf_bound"] == 1.0 and spec["bound_satisfied"] is True

    cp = load("check_cp_transpose2")
    assert set(cp) == {"cp", "min_choi_eig"}
    assert cp["cp"] is False and cp["min_choi_eig"] == pytest.approx(-1.0, abs=1e-12)

    w = load("witness_pure3")
    assert w["value"] == pytest.approx(np.sqrt(0.5) - 1, abs=1e-12)
    assert w["cone"] == {"trace_nonneg": True, "trace_sq": True}
    assert w["sampled_min"] >= -1e-9

    assert load("witness_mixed3")["error"] == "InBall"
    assert load("decompose_jordan2")["error"] == "NonDiagonalizable"
    assert load("convert_kraus_transpose2")["error"] == "NotCP"
    assert load("gen_example_bad_alpha")["error"] == "SpecError"
    assert load("member_projection_state00")["member"] is False
    assert load("member_ball_mixed3")["member"] is True
    assert load("member_ball_pure3")["member"] is False
    assert load("check_sample_transpose3")["positive_sample"]["counterexample_found"] is False
    assert load("demo_example_map")["max_deviation"] <= 1e-10


def test_schema_errors_point_at_path():
    assert load("schema_bad_entry")["path"] == "/data/data/5"
    assert load("schema_bad_repr")["path"] == "/repr"
    assert load("schema_not_json")["error"] == "SchemaError"


def test_gen_outputs_round_trip_through_check(tmp_path):
    code, out, _ = invoke(["gen", "ball", "3"])
    phi = jsonio.map_from_json(json.loads(out))
    path = tmp_path / "ball.json"
    path.write_text(out, encoding="utf-8")
    code, out, _ = invoke(["check", "--cp", "--unital", "--tp", "--selfadjoint", str(path)])
    assert code == 0
    assert json.loads(out) == {"cp": True, "min_choi_eig": json.loads(out)["min_choi_eig"],
                               "unital": True, "tp": True, "selfadjoint": True}
    assert phi.d == 3


def test_werner_member_of_its_own_image(tmp_path):
    s = (np.eye(4) + flip(2)) / 6
    path = tmp_path / "w.json"
    path.write_text(jsonio.dumps(jsonio.matrix_to_json(s)), encoding="utf-8")
    code, out, _ = invoke(["member", "--projection", "werner2.json", str(path)])
    assert code == 0 and json.loads(out)["member"] is True


def test_verbose_table_goes_to_stderr():
    code, out, err = invoke(["-v", "spectrum", "identity2.json"])
    assert code == 0
    json.loads(out)
    assert "eigenvalue" in err and "pf bound" in err


def test_usage_errors_exit_2():
    assert invoke(["frobnicate"])[0] == 2
    assert invoke(["spectrum", "--bogus", "identity2.json"])[0] == 2
    assert invoke(["member", "pure3.json"])[0] == 2
    assert invoke(["spectrum", "missing.json"])[0] == 2
    assert invoke(["gen", "example", "--alpha", "a,b", "--beta", "beta3.json"])[0] == 2


def test_atol_env(monkeypatch):
    monkeypatch.setenv("POSMAP_ATOL", "not-a-number")
    assert invoke(["spectrum", "identity2.json"])[0] == 2
    monkeypatch.setenv("POSMAP_ATOL", "1e-6")
    assert invoke(["spectrum", "identity2.json"])[0] == 0


def test_stdin_and_output_file(tmp_path, monkeypatch):
    text = (INPUTS / "identity2.json").read_text(encoding="utf-8")
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    target = tmp_path / "out.json"
    code, out, _ = invoke(["-o", str(target), "spectrum", "-"])
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8") == (GOLDEN / "spectrum_identity2.json").read_text(encoding="utf-8")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "posmap", "spectrum", str(INPUTS / "identity2.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "spectrum_identity2.json").read_text(encoding="utf-8")
