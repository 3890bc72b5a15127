import json
from pathlib import Path

import pytest

from fglring.cli import ORDER_CAP, run
from regen_golden import CASES

GOLDEN = Path(__file__).parent / "golden"


def invoke(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, _ = invoke(CASES[name], capsys)
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text()


def test_expand_krichever_has_chi1_at_uv(capsys):
    code, out, _ = invoke(["expand", "--kind", "krichever", "--order", "4"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == 1
    names = rep["gens"]["names"]
    terms = {tuple(e): p for e, p in rep["series"]["terms"]}
    chi1 = [1 if n == "chi_1" else 0 for n in names]
    assert terms[(1, 1)] == [[chi1, "1"]]
    assert rep["series"]["vars"] == ["u", "v"] and rep["series"]["order"] == 4


def test_rho_table(capsys):
    code, out, _ = invoke(["rho", "--max-n", "9"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    want = {1: None, 2: None, 3: None, 4: None, 5: 5, 6: 2, 7: 7, 8: 2, 9: 3}
    for row in rep["rows"]:
        assert row["rho"] == want[row["n"]]
    assert {r["kind"] for r in rep["rows"]} == {"buchstaber", "krichever"}


def test_verify_iso_all_pass(capsys):
    code, out, _ = invoke(["verify-iso", "--max-weight", "12"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and not rep["failed"]


def test_deterministic_and_thread_independent(capsys, monkeypatch):
    argv = ["torsion", "--max-weight", "7", "--kind", "both"]
    _, a, _ = invoke(argv, capsys)
    _, b, _ = invoke(argv, capsys)
    monkeypatch.setenv("FGLRING_THREADS", "2")
    _, c, _ = invoke(argv, capsys)
    assert a == b == c


def test_progress_goes_to_stderr(capsys):
    code, out, err = invoke(["rho", "--max-n", "5", "-v"], capsys)
    assert code == 0
    assert "rho buchstaber n=5" in err
    json.loads(out)  # stdout is pure JSON


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = invoke(["ode-check", "--output", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["passed"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["expand", "--kind", "nope"],
        ["expand", "--order", str(ORDER_CAP + 1)],
        ["expand", "--order", "1"],
        ["ode-check", "--order", "5"],
        ["rho", "--max-n", "0"],
        ["membership", "--poly", "A_1 + B_2"],
        ["membership", "--poly", "Q_7"],
        ["membership", "--poly", "__import__('os')"],
        ["en", "--n", "3", "--lambdas", "1,1,1"],
        ["rho", "--max-n", "3", "--threads", "0"],
    ],
)
def test_usage_errors(argv, capsys):
    code, out, _ = invoke(argv, capsys)
    assert code == 2
    assert out == ""


def test_bad_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("FGLRING_THREADS", "many")
    code, _, err = invoke(["rho", "--max-n", "2"], capsys)
    assert code == 2 and "FGLRING_THREADS" in err


def test_cap_override(capsys):
    code, out, _ = invoke(["expand", "--order", "15", "--cap", "15", "--kind", "generic"], capsys)
    assert code == 0 and json.loads(out)["series"]["order"] == 15


def test_verification_failure_exit_code(capsys):
    code, out, _ = invoke(["membership", "--poly", "A_1^2 + B_2"], capsys)
    rep = json.loads(out)
    assert code == 1 and not rep["passed"] and rep["rows"][0]["member"] is False


def test_membership_with_certificate(capsys):
    code, out, _ = invoke(["membership", "--poly", "A_1*A_3 + A_4", "--certificates"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["rows"][0]["certificate"]


def test_fresh_process_matches_golden():
    import os
    import subprocess
    import sys

    env = dict(os.environ, PYTHONHASHSEED="7")
    proc = subprocess.run(
        [sys.executable, "-m", "fglring.cli"] + CASES["rho_10"],
        capture_output=True, text=True, env=env, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "rho_10.json").read_text()
