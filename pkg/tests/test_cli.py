import io
import json
import subprocess
import sys

import pytest

from algclt import cli, oracles


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_limit_free_json():
    code, doc = run_json("limit", "--kind", "free", "--n", "2,4,6,8")
    assert code == 0
    assert doc["schema_version"] == 1 and doc["command"] == "limit"
    assert [r["exact"] for r in doc["results"]] == ["1", "2", "5", "14"]
    assert [r["approx"] for r in doc["results"]] == [1.0, 2.0, 5.0, 14.0]
    assert all(r["N"] == "limit" for r in doc["results"])


def test_qlimit_string():
    code, doc = run_json("qlimit", "--n", "6")
    assert doc["results"][0]["exact"] == "5 + 6*q + 3*q^2 + q^3"
    code, doc = run_json("limit", "--kind", "q", "--n", "4", "--q", "1/2")
    assert doc["results"][0]["value"] == {"exact": "5/2", "approx": 2.5}


def test_finite_n_rows_carry_errors():
    code, doc = run_json("finite-n", "--kind", "tensor", "--n", "4", "--N", "2,4")
    rows = doc["results"]
    assert [r["N"] for r in rows] == [2, 4, "limit"]
    assert rows[0]["exact"] == "2" and rows[0]["error_exact"] == "1"
    assert rows[1]["error_exact"] == "1/2"
    assert "error_exact" not in rows[2]


def test_csv_output():
    code, text = run("limit", "--kind", "tensor", "--n", "2,4", "--csv")
    lines = text.strip().splitlines()
    assert lines[0] == "n,labels,N,exact,approx"
    assert lines[2] == "4,b b b b,limit,3,3.0"


def test_output_is_deterministic():
    args = ("finite-n", "--kind", "monotone", "--n", "4,5", "--N", "1,3")
    assert run(*args) == run(*args)


def test_distribution_file(tmp_path):
    f = tmp_path / "d.toml"
    f.write_text('[distribution]\npower_moments = ["0", "2", "0", "7"]\n')
    code, doc = run_json("limit", "--kind", "free", "--n", "4", "--dist", str(f))
    assert code == 0 and doc["results"][0]["exact"] == "8"


def test_multi_label_distribution_file(tmp_path):
    f = tmp_path / "d.toml"
    f.write_text(
        '[distribution]\n'
        'adjoint = { c = "c*", "c*" = "c" }\n'
        '[distribution.moments]\n'
        '"c" = "0"\n"c*" = "0"\n"c c" = "0"\n"c* c*" = "0"\n"c c*" = "1"\n"c* c" = "0"\n'
    )
    code, doc = run_json("limit", "--kind", "free", "--labels", "c,c*", "--dist", str(f))
    assert code == 0 and doc["results"][0]["exact"] == "1"


def test_config_file_and_flag_override(tmp_path):
    f = tmp_path / "p.toml"
    f.write_text('kind = "boolean"\ndegrees = [2, 4]\n')
    code, doc = run_json("limit", "--config", str(f))
    assert [r["exact"] for r in doc["results"]] == ["1", "1"]
    code, doc = run_json("limit", "--config", str(f), "--kind", "free")
    assert [r["exact"] for r in doc["results"]] == ["1", "2"]


def test_float_in_config_rejected_with_field(tmp_path):
    f = tmp_path / "d.toml"
    f.write_text('[distribution]\npower_moments = ["0", 1.5]\n')
    code, doc = run_json("limit", "--dist", str(f))
    assert code == 1
    assert doc["error"]["field"] == "distribution.power_moments[1]"


def test_toml_syntax_error_reports_line(tmp_path):
    f = tmp_path / "bad.toml"
    f.write_text('kind = "free"\ndegrees = [2, x]\n')
    code, doc = run_json("limit", "--config", str(f))
    assert code == 1
    assert (doc["error"]["line"], doc["error"]["column"]) == (2, 15)


@pytest.mark.parametrize(
    "argv",
    [
        ("limit", "--kind", "nope"),
        ("limit", "--n", "x"),
        ("finite-n", "--kind", "q"),
        ("qccr", "--q", "1", "--depth", "16"),
        ("frobnicate",),
    ],
)
def test_input_errors_exit_1(argv):
    code, doc = run_json(*argv)
    assert code == 1 and doc["error"]["type"] == "input"


def test_missing_moment_exits_2(tmp_path):
    f = tmp_path / "d.toml"
    f.write_text('[distribution]\npower_moments = ["0", "1"]\n')
    code, doc = run_json("finite-n", "--n", "4", "--N", "2", "--dist", str(f))
    assert code == 2 and doc["error"]["type"] == "missing-moment"


def test_fock_command():
    code, doc = run_json("fock", "--flavor", "q", "--n", "8")
    assert doc["results"][0]["coefficients"] == [14, 28, 28, 20, 10, 4, 1]
    code, doc = run_json("fock", "--flavor", "boson", "--n", "6")
    r = doc["results"][0]
    assert r["exact"] == "15" and r["matrix_approx"] == pytest.approx(15.0)


def test_qccr_command():
    code, doc = run_json("qccr", "--q", "1/2", "--depth", "32", "--k-max", "6")
    assert code == 0
    assert all(r["ok"] for r in doc["results"] if "ok" in r)


def test_opvalued_command():
    code, doc = run_json("opvalued", "--seed", "3", "--n", "2,4", "--N", "2")
    assert code == 0
    limits = [r for r in doc["results"] if r["N"] == "limit"]
    assert all(r["vacuum_equals_limit"] for r in limits)
    assert len(limits[0]["exact"]) == 2


def test_check_hypotheses_command():
    code, doc = run_json("check-hypotheses", "--kind", "monotone", "--n", "4")
    by_name = {r["hypothesis"]: r for r in doc["results"] if r["hypothesis"] != "bound"}
    assert by_name["singleton"]["passed"] and by_name["spreadability"]["passed"]
    assert not by_name["exchangeability"]["passed"]
    assert by_name["exchangeability"]["witness"]["sites"] == [1, 2, 2, 1]


def test_verify_only_qccr():
    code, text = run("verify", "--only", "qccr")
    assert code == 0
    assert text.startswith("[PASS] qccr")


def test_verify_unknown_check():
    code, doc = run_json("verify", "--only", "nonexistent")
    assert code == 1


def test_verify_detects_injected_fault(monkeypatch):
    # an off-by-one Catalan oracle must make the free-limit check fail
    real = oracles.catalan
    monkeypatch.setattr(oracles, "catalan", lambda n: real(n) + 1)
    code, text = run("verify", "--only", "limits")
    assert code == 3
    assert "[FAIL] free-limit" in text
    assert "[PASS] tensor-limit" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "algclt", "limit", "--kind", "monotone", "--n", "4"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["results"][0]["exact"] == "3/2"
