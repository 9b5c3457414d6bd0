import json
import subprocess
import sys

import pytest

from postwidder.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_text(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "1..2")
    assert code == 0
    assert out.splitlines() == [
        "c_1 = b*x^2*f^(1) + 1/2*x^2*f^(2)",
        "c_2 = (b*x^3 + 1/2*b^2*x^4)*f^(2) + (1/3*x^3 + 1/2*b*x^4)*f^(3) + 1/8*x^4*f^(4)",
    ]


def test_coeffs_beta0_json(capsys):
    code, out, _ = run(capsys, "coeffs", "--k", "2", "--beta0", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data[0]["k"] == 2
    assert all(r["j"] == 0 for r in data[0]["rows"])


def test_dump_stirling(capsys):
    code, out, _ = run(capsys, "coeffs", "--dump-stirling", "4")
    lines = out.splitlines()
    assert code == 0
    assert "0\t6\t11\t6\t1" in lines
    assert "0\t6\t3" in lines


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--r", "1", "--central")
    assert (code, out) == (0, "b*x^2*invn\n")
    code, out, _ = run(capsys, "moments", "--r", "1", "--format", "json")
    assert json.loads(out)[0]["text"] == "x + b*x^2*invn"


def test_eval_json(capsys):
    code, out, _ = run(capsys, "eval", "--function", "exp:A=1", "--x", "1", "--n", "20", "--beta", "1",
                       "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert d["closed_form_rel_diff"] < 1e-10
    assert {"value", "err_estimate", "nu_terms_used", "nodes_used", "method"} <= set(d)


def test_eval_via_0f1_text(capsys):
    code, out, _ = run(capsys, "eval", "--function", "sin", "--x", "1", "--n", "20", "--beta", "1", "--via-0f1")
    assert code == 0 and "0F1" in out


def test_global_flag_before_subcommand(capsys):
    code, out, _ = run(capsys, "--format", "json", "moments", "--r", "0")
    assert code == 0 and json.loads(out)[0]["text"] == "1"


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "--function", "cos", "--x", "2", "--n", "30", "--beta", "0.5", "--q", "3",
                       "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["terms"]) == 4 and abs(d["residual"]) < 1e-3


def test_converge_csv_and_out_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    args = ["converge", "--function", "exp:A=1", "--x", "1", "--beta", "1", "--q", "1",
            "--n-min", "8", "--n-max", "64", "--format", "csv", "--out", str(path)]
    assert main(args) == 0
    first = path.read_bytes()
    assert main(args) == 0
    assert path.read_bytes() == first
    assert first.startswith(b"n,value,reference,residual\n")


def test_converge_check_exit_codes(capsys):
    base = ["converge", "--function", "exp:A=1", "--x", "1", "--beta", "1", "--n-min", "8", "--n-max", "64", "--check"]
    assert run(capsys, *base, "--q", "1")[0] == 0
    assert run(capsys, *base, "--q", "1", "--slope-tol", "0.001")[0] == 1


def test_voronovskaja(capsys):
    code, out, _ = run(capsys, "voronovskaja", "--function", "exp:A=1", "--x", "1", "--beta", "1",
                       "--n-min", "32", "--n-max", "512", "--points", "5", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["monotone"] and d["last_deviation"] < 0.01 * d["limit"]


def test_localize_exit_codes(capsys):
    ok = run(capsys, "localize", "--base", "exp:A=1", "--x", "1", "--beta", "1", "--delta", "0.5",
             "--n-grid", "20,40,80,160,320,640")
    assert ok[0] == 0 and "PASS" in ok[1]
    bad = run(capsys, "localize", "--base", "exp:A=1", "--x", "1", "--beta", "1", "--delta", "1000",
              "--n-grid", "20,40,80")
    assert bad[0] == 1


def test_usage_errors(capsys):
    assert run(capsys, "eval", "--function", "bogus", "--x", "1", "--n", "2")[0] == 2
    assert run(capsys, "eval", "--function", "exp:A=1", "--x", "2", "--n", "1")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2
    assert run(capsys, "coeffs", "--k", "x..y")[0] == 2
    assert run(capsys, "localize", "--base", "sin", "--x", "1", "--delta", "1")[0] == 2
    code, _, err = run(capsys, "eval", "--function", "exp:A=", "--x", "1", "--n", "2")
    assert code == 2 and "position 6" in err


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "eval", "--function", "exp:A=1", "--x", "3", "--n", "20", "--beta", "5",
                       "--tol", "1e-300")
    assert code == 3 and "budget" in err


def test_selftest_only(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "binomial")
    assert code == 0 and "binomial" in out and "stirling" not in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "postwidder", "moments", "--r", "2", "--central"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == "x^2*invn + 2*b*x^3*invn^2 + b^2*x^4*invn^2\n"
