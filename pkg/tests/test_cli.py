import csv
import io
import json
import subprocess
import sys
from math import comb

import pytest

from holcliff.algebra import AlgebraConfig
from holcliff.cli import MAX_BASIS_ROWS, basis_row_count, check_certificate, main
from holcliff.polynomial import MvPolynomial, poly_to_json

CFG = AlgebraConfig(1)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_poly(tmp_path, p, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(poly_to_json(p)))
    return str(path)


# -- verify ------------------------------------------------------------------------

def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "10")
    assert code == 0
    assert out.strip().endswith("ALL PASS")


def test_verify_json_report(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "5", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert {"identity", "group", "status", "statement", "counterexample"} <= set(data["results"][0])


def test_verify_low_degree(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "5", "--max-degree", "2", "--format", "json")
    data = json.loads(out)
    low = next(r for r in data["results"] if r["identity"] == "low_degree_holomorphic")
    assert code == 0 and low["status"] == "pass"


def test_fault_injection_fails_with_counterexample(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "5", "--fault-inject", "--format", "json")
    data = json.loads(out)
    assert code == 1 and not data["passed"] and data["config"]["fault_injected"]
    failed = [r for r in data["results"] if r["status"] == "fail"]
    assert failed and all(r["counterexample"] for r in failed)


def test_verify_output_file(capsys, tmp_path):
    target = tmp_path / "report.csv"
    code, out, _ = run(capsys, "verify", "--samples", "3", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert rows and {"identity", "status"} <= set(rows[0])


# -- basis -------------------------------------------------------------------------

def test_basis_csv_contains_worked_example(capsys):
    code, out, _ = run(capsys, "basis", "--format", "csv")
    assert code == 0
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["alpha"] == "(1,1,0,0)"]
    got = {(r["monomial"], r["blade"]): r["coefficient"] for r in rows}
    # e_0 x e_1 + e_1 x e_0 = 2(x_0 e_1 - x_1)
    assert got == {("x0", "e1"): "2", ("x1", "1"): "-2"}


def test_basis_unit_rows(capsys):
    _, out, _ = run(capsys, "basis", "--format", "csv", "--max-degree", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["alpha"], r["monomial"], r["blade"], r["coefficient"]) for r in rows] == [
        ("(1,0,0,0)", "1", "1", "1"), ("(0,1,0,0)", "1", "e1", "1"),
        ("(0,0,1,0)", "1", "e2", "1"), ("(0,0,0,1)", "1", "e3", "1"),
    ]


@pytest.mark.parametrize("m,top", [(1, 3), (2, 2)])
def test_basis_json_counts(capsys, m, top):
    _, out, _ = run(capsys, "basis", "--format", "json", "--m", str(m), "--max-degree", str(top))
    entries = json.loads(out)["entries"]
    dim = 2 * m + 2
    for t in range(1, top + 1):
        assert sum(1 for e in entries if sum(e["alpha"]) == t) == comb(t + dim - 1, dim - 1)


def test_basis_s_kind(capsys):
    code, out, _ = run(capsys, "basis", "--format", "json", "--kind", "S", "--max-degree", "1")
    entries = json.loads(out)["entries"]
    assert code == 0 and len(entries) == 5
    assert all(e["kind"] == "S" and e["rho_power"] >= 1 for e in entries)


def test_basis_cap(capsys):
    top = next(t for t in range(1, 40) if basis_row_count(AlgebraConfig(2), t) > MAX_BASIS_ROWS)
    code, _, err = run(capsys, "basis", "--m", "2", "--max-degree", str(top))
    assert code == 2 and "cap" in err


def test_bad_m(capsys):
    code, _, _ = run(capsys, "basis", "--m", "-1")
    assert code == 2


# -- expand ------------------------------------------------------------------------

def test_expand_cube_certificate(capsys, tmp_path):
    x = MvPolynomial.paravector_var(CFG)
    code, out, _ = run(capsys, "expand", write_poly(tmp_path, x ** 3), "--format", "json")
    cert = json.loads(out)
    assert code == 0 and cert["proof"]["exact_match"]
    assert cert["proof"]["difference"] == []
    assert check_certificate(CFG, cert)


def test_expand_constant(capsys, tmp_path):
    from holcliff.algebra import Multivector

    p = MvPolynomial.constant(CFG, Multivector.basis(CFG, 2))
    code, out, _ = run(capsys, "expand", write_poly(tmp_path, p), "--format", "json")
    cert = json.loads(out)
    # a single degree-0 coefficient; which unit P_alpha carries it is a pivot choice
    assert code == 0 and cert["proof"]["exact_match"]
    assert len(cert["coefficients"]) == 1 and sum(cert["coefficients"][0]["alpha"]) == 1


def test_expand_rejects_non_holomorphic(capsys, tmp_path):
    p = MvPolynomial.coordinate(CFG, 0) ** 3
    code, out, err = run(capsys, "expand", write_poly(tmp_path, p))
    assert code == 2 and out == ""
    assert "not holomorphic" in err and "6" in err


def test_expand_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "expand", str(bad))[0] == 2
    assert run(capsys, "expand", str(tmp_path / "missing.json"))[0] == 2


def test_tampered_certificate_is_caught(capsys, tmp_path):
    x = MvPolynomial.paravector_var(CFG)
    _, out, _ = run(capsys, "expand", write_poly(tmp_path, x * x), "--format", "json")
    cert = json.loads(out)
    cert["coefficients"][0]["coeff"][0]["num"] = "7"
    assert not check_certificate(CFG, cert)


# -- cauchy and kernels ------------------------------------------------------------

def test_cauchy_passes_and_is_deterministic(capsys):
    code, first, _ = run(capsys, "cauchy", "--format", "csv")
    _, second, _ = run(capsys, "cauchy", "--format", "csv")
    assert code == 0 and first == second
    rows = list(csv.DictReader(io.StringIO(first)))
    assert {"x^3", "x^3/exterior", "P(0,1,1,0)"} <= {r["function_id"] for r in rows}
    assert all(r["wall_time_ms"] == "" for r in rows)
    assert max(float(r["abs_error"]) for r in rows if r["rule_order"] == "24") <= 1e-3


def test_cauchy_json_summary(capsys):
    code, out, _ = run(capsys, "cauchy", "--format", "json", "--points", "2", "--timing")
    s = json.loads(out)["summary"]
    assert code == 0 and s["error_decreases_with_order"] and s["exterior_within_tolerance"]


def test_cauchy_tight_tolerance_fails(capsys):
    code, _, _ = run(capsys, "cauchy", "--points", "2", "--rule-order", "8", "--tolerance", "1e-12")
    assert code == 1


def test_kernels_json(capsys):
    code, out, _ = run(capsys, "kernels", "--format", "json", "--truncation", "2")
    entries = json.loads(out)
    assert code == 0
    assert all({"identity", "m", "truncation", "status"} <= set(e) for e in entries)
    assert {e["truncation"] for e in entries} == {2}
    assert next(e for e in entries if e["identity"] == "constant_chain")["status"] == "pass"


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "holcliff", "kernels", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("identity,")
