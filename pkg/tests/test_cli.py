import contextlib
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from polylap.cli import main


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def run_json(argv):
    code, out, err = run_cli(argv)
    assert code == 0, err
    return json.loads(out)


def test_spectrum_square_payload():
    payload = run_json(["spectrum", "--regular", "4"])
    assert payload["schema_version"] == 1
    assert payload["command"] == "spectrum"
    assert payload["n"] == 4
    assert np.allclose(payload["eigenvalues"], [0.0, 2.0, 2.0, 4.0], atol=1e-9)
    assert math.isclose(payload["sum_nontrivial"], 8.0, abs_tol=1e-9)
    assert math.isclose(payload["product_nontrivial"], 16.0, abs_tol=1e-9)
    assert math.isclose(payload["matrix_tree_product"], 16.0, abs_tol=1e-9)
    assert abs(payload["identity_residuals"]["e3_minus_e1"]) < 1e-12
    assert len(payload["matrix"]) == 4 and len(payload["matrix"][0]) == 4


def test_spectrum_identity_residual_keys():
    tri = run_json(["spectrum", "--regular", "3"])
    assert set(tri["identity_residuals"]) == {"e2_minus_1"}
    assert abs(tri["identity_residuals"]["e2_minus_1"]) < 1e-12
    pent = run_json(["spectrum", "--regular", "5"])
    assert pent["identity_residuals"] == {}


def test_spectrum_csv():
    code, out, _ = run_cli(["spectrum", "--regular", "4", "--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 5
    assert lines[1].startswith("0,")


def test_theta_and_degrees_agree():
    a = run_json(["spectrum", "--theta", "60,60,60", "--degrees"])
    b = run_json(["spectrum", "--regular", "3"])
    assert np.allclose(a["eigenvalues"], b["eigenvalues"], atol=1e-12)


def test_byte_determinism():
    argvs = [
        ["spectrum", "--theta", "0.7,1.1,1.3415926535897931"],
        ["verify", "T1-sum-min", "--samples", "2000", "--seed", "1"],
        ["optimize", "--objective", "sumcot", "--n", "5", "--starts", "3", "--seed", "2"],
        ["probe", "--objective", "sumcot", "--target", "0,1.5707963267948966,1.5707963267948966"],
        ["sweep", "--steps", "10"],
    ]
    for argv in argvs:
        _, first, _ = run_cli(argv)
        _, second, _ = run_cli(argv)
        assert first == second, argv


def test_input_file_polygon(tmp_path):
    path = tmp_path / "poly.json"
    path.write_text(json.dumps({"theta": [0.5, 0.9, 1.2, math.pi - 2.6]}))
    payload = run_json(["spectrum", "--input", str(path)])
    assert payload["n"] == 4
    deg = tmp_path / "deg.json"
    deg.write_text(json.dumps({"theta_degrees": [60, 60, 60]}))
    payload = run_json(["spectrum", "--input", str(deg)])
    assert np.allclose(payload["eigenvalues"], [0, math.sqrt(3), math.sqrt(3)], atol=1e-9)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"angles": [1, 1, 1]}))
    code, _, err = run_cli(["spectrum", "--input", str(bad)])
    assert code == 2 and "theta" in err


def test_mesh_spectrum(tmp_path):
    path = tmp_path / "mesh.json"
    path.write_text(json.dumps({
        "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]],
        "faces": [[0, 1, 2], [0, 2, 3]],
    }))
    full = run_json(["mesh-spectrum", "--input", str(path)])
    assert full["schema_version"] == 1
    assert full["command"] == "mesh-spectrum"
    assert full["n_vertices"] == 4
    assert full["convention"] == "full"
    # fan of the inscribed square carries the square's cyclic spectrum
    assert np.allclose(full["eigenvalues"], [0.0, 2.0, 2.0, 4.0], atol=1e-9)
    half = run_json(["mesh-spectrum", "--input", str(path), "--convention", "half"])
    assert np.allclose(half["eigenvalues"], [0.0, 1.0, 1.0, 2.0], atol=1e-9)
    code, out, _ = run_cli(["mesh-spectrum", "--input", str(path), "--format", "csv"])
    assert code == 0
    assert out.split("\n")[0] == "index,eigenvalue"


def test_mesh_spectrum_missing_keys(tmp_path):
    path = tmp_path / "mesh.json"
    path.write_text(json.dumps({"vertices": [[0, 0]]}))
    code, _, err = run_cli(["mesh-spectrum", "--input", str(path)])
    assert code == 2
    assert "vertices" in err and "faces" in err


def test_verify_passing_bound():
    payload = run_json(["verify", "T2-sum-min", "--samples", "2000", "--seed", "1"])
    assert payload["schema_version"] == 1
    assert payload["command"] == "verify"
    assert payload["theorem"] == "T2-sum-min"
    assert payload["passed"] is True
    assert payload["violations"] == 0
    assert payload["bound"] == 8.0
    assert payload["gap"] >= 0.0
    assert payload["side"] == "min"


def test_verify_inline_and_flag_sizes_match():
    inline = run_json(["verify", "T3-sum-min(6)", "--samples", "2000", "--seed", "3"])
    flagged = run_json(["verify", "T3-sum-min", "--n", "6", "--samples", "2000", "--seed", "3"])
    assert inline["theorem"] == flagged["theorem"] == "T3-sum-min(6)"
    assert inline["extremal"] == flagged["extremal"]
    assert inline["n"] == 6


def test_verify_csv():
    code, out, _ = run_cli(["verify", "T1-sum-min", "--samples", "1000", "--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].split(",")[:4] == ["theorem", "n", "samples", "seed"]
    assert len(lines) == 2
    assert lines[1].endswith("True")


def test_optimize_explicit_start():
    payload = run_json([
        "optimize", "--objective", "sum-cot",
        "--theta", "0.8,1.1,1.2415926535897931",
    ])
    assert payload["command"] == "optimize"
    assert payload["objective"] == "sumcot"
    assert payload["all_converged"] is True
    run = payload["runs"][0]
    assert np.allclose(run["final"], [math.pi / 3] * 3, atol=1e-6)
    assert run["reduced_gradient_norm"] < 1e-9
    assert run["converged"] is True


def test_optimize_multistart_csv():
    code, out, _ = run_cli([
        "optimize", "--objective", "esym", "--n", "5",
        "--starts", "4", "--seed", "7", "--format", "csv",
    ])
    assert code == 0
    lines = out.strip().split("\n")
    header = lines[0].split(",")
    assert header[:2] == ["run", "converged"]
    assert header[-5:] == ["final_0", "final_1", "final_2", "final_3", "final_4"]
    assert len(lines) == 5


def test_optimize_iteration_cap_exits_one():
    code, out, _ = run_cli([
        "optimize", "--objective", "sumcot",
        "--theta", "0.8,1.1,1.2415926535897931", "--max-iterations", "1",
    ])
    assert code == 1
    assert json.loads(out)["all_converged"] is False


def test_optimize_start_spec_conflicts():
    code, _, err = run_cli([
        "optimize", "--objective", "sumcot", "--n", "5", "--regular", "5",
    ])
    assert code == 2 and "either" in err
    code, _, err = run_cli(["optimize", "--objective", "sumcot"])
    assert code == 2 and "start" in err


def test_probe_payload():
    payload = run_json([
        "probe", "--objective", "gquad", "--target",
        "0,1.0471975511965976,1.0471975511965976,1.0471975511965979",
    ])
    assert payload["command"] == "probe"
    assert payload["steps"] == 20
    assert len(payload["values"]) == 20
    assert payload["values"][0] == pytest.approx(20.0, rel=1e-9)
    assert payload["values"][-1] > payload["values"][0] * 1e3
    code, out, _ = run_cli([
        "probe", "--objective", "sumcot", "--target", "0,90,90",
        "--degrees", "--steps", "8", "--format", "csv",
    ])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,scale,value"
    assert len(lines) == 9


def test_sweep_formats():
    code, out, _ = run_cli(["sweep", "--steps", "12"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,t,lambda1,lambda2"
    assert len(lines) == 13
    payload = run_json(["sweep", "--steps", "12", "--format", "json"])
    assert payload["command"] == "sweep"
    assert payload["family"] == "isoceles-triangle"
    assert len(payload["rows"]) == 12
    # lambda1 <= sqrt(3) <= lambda2 along the family, equality mid-sweep only
    for row in payload["rows"]:
        assert row["lambda1"] <= math.sqrt(3.0) + 1e-9
        assert row["lambda2"] >= math.sqrt(3.0) - 1e-9


@pytest.mark.parametrize(
    "argv, hint",
    [
        (["spectrum", "--theta", "1,1,1"], "SumMismatch"),
        (["spectrum", "--regular", "2"], "TooFewArcs"),
        (["verify", "T9-bogus", "--samples", "10"], "UnknownTheorem"),
        (["verify", "T3-sum-min", "--samples", "10"], "ArityMismatch"),
        (["optimize", "--objective", "nope", "--regular", "4"], "ValueError"),
        (["optimize", "--objective", "lambda1", "--regular", "4"], "Unsupported"),
        (["probe", "--objective", "sumcot", "--target", "0.5,1.5,1.14"], "InvalidTarget"),
        (["spectrum", "--input", "/nonexistent/poly.json"], "Error"),
    ],
)
def test_validation_errors_exit_two(argv, hint):
    code, out, err = run_cli(argv)
    assert code == 2
    assert out == ""
    msg = json.loads(err)
    assert set(msg) == {"error", "message"}
    assert hint in msg["error"] or hint in msg["message"]


def test_usage_errors_exit_two():
    for argv in (
        [],
        ["spectrum"],
        ["spectrum", "--regular", "4", "--theta", "1,1,1.14"],
        ["spectrum", "--regular", "4", "--format", "yaml"],
    ):
        buf = io.StringIO()
        with contextlib.redirect_stderr(buf), pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polylap", "spectrum", "--regular", "4"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert payload["command"] == "spectrum"
    assert payload["schema_version"] == 1
