import json

from qplane import fixtures
from qplane.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_gl2_all_passes(capsys):
    code, out, _ = run(capsys, "verify", "--plane", "gl2", "--suite", "all")
    assert code == 0
    assert "0 failed" in out


def test_verify_sphere_closedness(capsys):
    code, out, _ = run(capsys, "verify", "--plane", "sphere_qm1",
                       "--suite", "closedness")
    assert code == 0
    assert "PASS closedness/d-omega-zero" in out


def test_verify_json_byte_deterministic_across_processes():
    import subprocess
    import sys
    cmd = [sys.executable, "-m", "qplane.cli", "verify", "--plane",
           "sphere_qm1", "--suite", "gamma", "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, text=True)
    second = subprocess.run(cmd, capture_output=True, text=True)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_verify_json_byte_deterministic(capsys):
    code1, out1, _ = run(capsys, "verify", "--plane", "gl2", "--suite", "all",
                         "--format", "json")
    code2, out2, _ = run(capsys, "verify", "--plane", "gl2", "--suite", "all",
                         "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["plane"] == "gl2"
    assert report["timing_s"] is None
    names = [c["name"] for c in report["checks"]]
    assert names == sorted(names)


def test_verify_strict_fails_on_findings(capsys):
    code, _, _ = run(capsys, "verify", "--plane", "gl2", "--suite", "wz",
                     "--strict")
    assert code == 1
    code, _, _ = run(capsys, "verify", "--plane", "gl2", "--suite", "wz")
    assert code == 0


def test_verify_corrupted_matrix_exits_1(tmp_path, capsys):
    bad = [list(row) for row in fixtures.R_GL2]
    bad[1][1] = "q + 1"
    doc = {
        "name": "broken",
        "dimension": 2,
        "generators": ["x", "y"],
        "family": "A",
        "r_matrix": bad,
        "q": "generic",
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify", "--plane", str(path))
    assert code == 1
    assert "Yang-Baxter" in out


def test_verify_schema_error_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "verify", "--plane", str(path))
    assert code == 2
    assert "error" in err


def test_verify_loads_valid_config(tmp_path, capsys):
    doc = {
        "name": "user-gl2",
        "dimension": 2,
        "generators": ["x", "y"],
        "family": "A",
        "r_matrix": fixtures.R_GL2,
        "q": "generic",
        "gamma": "r_over_q",
    }
    path = tmp_path / "gl2.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify", "--plane", str(path),
                       "--suite", "ybe")
    assert code == 0


def test_nf_command(capsys):
    code, out, _ = run(capsys, "nf", "--plane", "gl2", "y*x")
    assert code == 0
    assert out.strip() == "s^-2 * x*y"
    code, out, _ = run(capsys, "nf", "--plane", "orth3", "x+ * x-")
    assert out.strip() == "x-*x+ + (-s + s^-1) * x0*x0"
    code, out, _ = run(capsys, "nf", "--plane", "gl2", "d(x)*d(x)")
    assert out.strip() == "0"


def test_nf_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "nf", "--plane", "gl2", "y*(x")
    assert code == 2
    assert "error" in err


def test_bracket_command(capsys):
    code, out, _ = run(capsys, "bracket", "--plane", "gl2", "x", "y")
    assert code == 0
    assert out.strip() == "-s^2"
    code, out, _ = run(capsys, "bracket", "--plane", "sphere_qm1",
                       "x+", "x-")
    assert out.strip() == "i * x0"


def test_bracket_without_symplectic_exit_2(capsys):
    code, _, err = run(capsys, "bracket", "--plane", "orth3", "x+", "x-")
    assert code == 2


def test_hamvec_command(capsys):
    code, out, _ = run(capsys, "hamvec", "--plane", "gl2", "x")
    assert code == 0
    assert "status: unique" in out
    assert "X = (s^2) * D(y)" in out
    code, out, _ = run(capsys, "hamvec", "--plane", "sphere_qm1", "x0")
    assert "status: family" in out
    assert "kernel[0]" in out


def test_hamvec_no_solution_exit_1(capsys):
    code, out, _ = run(capsys, "hamvec", "--plane", "sphere_qm1",
                       "x0*x+", "--degree", "0")
    assert code == 1
    assert "no solution" in out


def test_bracket_no_solution_exit_1(capsys):
    code, out, _ = run(capsys, "bracket", "--plane", "sphere_qm1",
                       "x0*x+", "x0", "--degree", "0")
    assert code == 1
    assert "degree bound" in out


def test_eom_command(capsys):
    code, out, _ = run(capsys, "eom", "--plane", "sphere_qm1", "x0")
    assert code == 0
    lines = dict(line.split(" = ") for line in out.strip().splitlines())
    assert lines["d/dt x+"] == "x+"
    assert lines["d/dt x-"] == "x-"
    assert lines["d/dt x0"] == "0"
