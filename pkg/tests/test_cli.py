import json
import subprocess
import sys

import pytest

from liebraid.cli import main
from liebraid.freealg import Alphabet, Series, series_from_json, series_to_json
from liebraid.kohno import normal_form


def write_series(tmp_path, name, s):
    p = tmp_path / name
    p.write_text(json.dumps(series_to_json(s)))
    return str(p)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--n", 3, "--max-k", 3)
    assert code == 0
    doc = json.loads(out)
    assert doc["universal"] == [1, 3, 7, 15] and doc["lie"] == [3, 1, 2]


def test_dims_csv(capsys):
    code, out, _ = run(capsys, "dims", "--n", 3, "--max-k", 2, "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["k,universal,lie", "0,1,", "1,3,3", "2,7,1"]


def test_nf_example_and_idempotence(tmp_path, capsys):
    K = Alphabet.kohno(3)
    path = write_series(tmp_path, "w.json", Series.word(K, 2, ((2, 3), (1, 2))))
    code, out, _ = run(capsys, "nf", "--input", path)
    assert code == 0
    s = series_from_json(out)
    expected = Series(K, 2, {((1, 2), (2, 3)): 1, ((1, 2), (1, 3)): 1, ((1, 3), (1, 2)): -1})
    assert s == expected
    again = tmp_path / "nf.json"
    again.write_text(out)
    code, out2, _ = run(capsys, "nf", "--input", again)
    assert code == 0 and json.loads(out2) == json.loads(out)


def test_grouplike_failure_reports_violation(tmp_path, capsys):
    A = Alphabet.free(2)
    path = write_series(tmp_path, "s.json", Series(A, 2, {(): 1, (1,): 1, (2,): 1}))
    code, out, _ = run(capsys, "grouplike", "--input", path)
    assert code == 1
    report = json.loads(out)
    assert not report["grouplike"]
    assert {"v": [1], "w": [2], "lhs": "1", "rhs": "0"} in report["violations"]


def test_grouplike_pass(tmp_path, capsys):
    from liebraid.freealg import series_exp

    A = Alphabet.free(2)
    path = write_series(tmp_path, "e.json", series_exp(Series.letter(A, 4, 1)))
    code, out, _ = run(capsys, "grouplike", "--input", path)
    assert code == 0 and json.loads(out)["grouplike"]


def test_malformed_input_names_field(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"alphabet": {"kind": "kohno"}, "truncation": 2, "terms": []}))
    code, _, err = run(capsys, "nf", "--input", p)
    assert code == 2
    assert "missing field 'n'" in err
    p.write_text("{not json")
    code, _, err = run(capsys, "nf", "--input", p)
    assert code == 2 and "invalid JSON" in err
    code, _, err = run(capsys, "nf", "--input", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err


def test_argparse_error_is_exit_2(capsys):
    code, _, _ = run(capsys, "dims", "--n", "three", "--max-k", 2)
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2


def test_csv_not_available(tmp_path, capsys):
    code, _, err = run(capsys, "rep-check", "--format", "csv")
    assert code == 2 and "csv" in err


def test_mul_and_project(tmp_path, capsys):
    K = Alphabet.kohno(3)
    a = write_series(tmp_path, "a.json", Series.letter(K, 2, (2, 3)))
    b = write_series(tmp_path, "b.json", Series.letter(K, 2, (1, 2)))
    code, out, _ = run(capsys, "mul", "--left", a, "--right", b)
    assert code == 0
    assert series_from_json(out) == normal_form(Series.word(K, 2, ((2, 3), (1, 2))))
    s = write_series(tmp_path, "s.json", Series.word(K, 2, ((1, 2), (2, 3))) + Series.letter(K, 2, (2, 3)))
    code, out, _ = run(capsys, "project", "--input", s, "--alpha", 1)
    assert code == 0
    assert series_from_json(out) == Series.letter(Alphabet.kohno(2), 2, (1, 2))


def test_bch_outputs_lie_element(tmp_path, capsys):
    A = Alphabet.free(2)
    x = write_series(tmp_path, "x.json", Series.letter(A, 2, 1))
    y = write_series(tmp_path, "y.json", Series.letter(A, 2, 2))
    code, out, _ = run(capsys, "bch", "--x", x, "--y", y, "--N", 2)
    assert code == 0
    doc = json.loads(out)
    lie = {json.dumps(t["lyndon"]): t["coeff"] for t in doc["lie"]["terms"]}
    assert lie == {"1": "1", "2": "1", "[1, 2]": "1/2"}


def test_norm_quotient(tmp_path, capsys):
    K = Alphabet.kohno(3)
    z = Series(K, 2, {((1, 2), (1, 3)): 1, ((1, 3), (1, 2)): -1, ((1, 2), (2, 3)): 1, ((2, 3), (1, 2)): -1})
    path = write_series(tmp_path, "z.json", z)
    code, out, _ = run(capsys, "norm", "--input", path)
    assert code == 0
    row = json.loads(out)["degrees"][0]
    assert float(row["value"]) < 1e-9 and row["ell1"] == "4"


def test_rep_and_poisson_checks(capsys):
    code, out, _ = run(capsys, "rep-check", "--factors", "1/2,1/2,1")
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "poisson-check", "--structure", "gl(3)")
    assert code == 0 and json.loads(out)["pass"]
    code, _, err = run(capsys, "poisson-check", "--structure", "sp(4)")
    assert code == 2


def test_monodromy_deterministic(capsys):
    argv = ["monodromy", "--factors", "1/2,1/2,1/2", "--generator", "1,3"]
    code, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code == code2 == 0 and out1 == out2


def test_braid_relations(capsys):
    code, out, _ = run(capsys, "braid-relations", "--factors", "1/2,1/2,1/2")
    assert code == 0 and json.loads(out)["pass"]


def test_flow_csv_and_seed(capsys, tmp_path):
    code, out, _ = run(capsys, "flow", "--n", 3, "--hamiltonian", "D12", "--T", 0.5, "--step", 0.01,
                       "--record-every", 10, "--format", "csv", "--seed", 3)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("t,x1,y1,z1,x2") and len(lines) == 7
    code, again, _ = run(capsys, "flow", "--n", 3, "--hamiltonian", "D12", "--T", 0.5, "--step", 0.01,
                         "--record-every", 10, "--format", "csv", "--seed", 3)
    assert again == out
    target = tmp_path / "flow.json"
    code, out, _ = run(capsys, "flow", "--T", 0.1, "--output", target)
    assert code == 0 and out == "" and json.loads(target.read_text())["radius_drift"] < 1e-8


def test_flow_compose(capsys):
    code, out, _ = run(capsys, "flow-compose", "--word", "D12:1,D34:1,D12:-1,D34:-1", "--samples", 10)
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "flow-compose", "--word", "D12:1,D13:1,D12:-1,D13:-1", "--samples", 10)
    assert code == 1
    code, _, _ = run(capsys, "flow-compose", "--word", "D12:x")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "liebraid", "dims", "--n", "2", "--max-k", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["universal"] == [1, 1, 1]
