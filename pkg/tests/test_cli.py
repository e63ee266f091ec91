import json

import pytest

from evosym.cli import FAIL, INDETERMINATE, OK, USAGE, run

PHI_LN = "T = ln(t); X = x; U = u; Tinv = exp(t); Xinv = x; Uinv = u"


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bracket(capsys):
    code, out, _ = _run(capsys, "bracket", "Dt", "t*Dt + x*Dx")
    assert code == OK and out.strip() == "Dt"


def test_rank_machine_output(capsys):
    code, out, _ = _run(capsys, "rank", "Du ; x*Du", "--output", "machine", "--seed", "5")
    assert code == OK and json.loads(out) == {"command": "rank", "rank": 1, "seed": 5}


def test_check_algebra_reports_defect(capsys):
    code, out, _ = _run(capsys, "check-algebra", "Du ; x*Du ; Dx", "A3.3")
    assert code == FAIL and "[e2,e3] fail" in out and "defect" in out
    code, _, _ = _run(capsys, "check-algebra", "Du ; x*Du ; -Dx", "A3.3")
    assert code == OK


def test_check_invariance_with_declarations(capsys):
    args = ["check-invariance", "Dx ; Dt ; t*Dx - Du ; Dt - u*Dx + q*Du", "--param", "q",
            "--alias", "tau=u2*u1^-3", "--func", "f(tau)"]
    code, out, _ = _run(capsys, *args, "--F", "u1^-3*f(tau)", "--G", "u*u1 - 3*u1^2*tau^2*f(tau) + q")
    assert code == OK and out.count(": pass") == 4
    code, out, _ = _run(capsys, *args, "--F", "u1^-3*f(tau)", "--G", "u*u1 - 2*u1^2*tau^2*f(tau) + q")
    assert code == FAIL and "fail" in out


def test_transform_with_basis_change(capsys):
    code, out, _ = _run(capsys, "transform", "T = t; X = u; U = x; Tinv = t; Xinv = u; Uinv = x", "Du ; x*Du ; -Dx",
                        "--expect", "Dx ; Du ; u*Dx", "--basis-change", "1,0,0; 0,0,-1; 0,1,0")
    assert code == OK and out.count("pass") == 3


def test_transform_rejects_bad_inverse(capsys):
    code, _, err = _run(capsys, "transform", "T = ln(t); X = x; U = u; Tinv = t; Xinv = x; Uinv = u", "Dt")
    assert code == FAIL and "identity" in err


def test_flag_linearizing(capsys):
    code, out, _ = _run(capsys, "flag-linearizing", "Dx ; x*Dx + u*Du ; u*Dx ; -u*Du", "--expect", "linearizing")
    assert code == OK and out.startswith("linearizing rank1_solvable_3d")
    code, _, _ = _run(capsys, "flag-linearizing", "Dt ; Dx ; Du", "--expect", "linearizing")
    assert code == FAIL


def test_verify_catalog_subset(capsys, tmp_path):
    code, out, err = _run(capsys, "verify-catalog", "--only", "A3.3-*", "--output", "machine", "--figures", str(tmp_path))
    assert code == OK
    recs = [json.loads(line) for line in out.splitlines()]
    assert any(r.get("summary") == 3 for r in recs)
    assert (tmp_path / "catalog_summary.png").exists()


@pytest.mark.parametrize(
    "argv",
    [["nonsense"], ["bracket", "Dt"], ["bracket", "Dt", "x +"], ["rank", "Du", "--param", "1q"],
     ["check-algebra", "Du", "B7"], ["verify-catalog", "/no/such/file.cat"], ["transform", "T = t", "Dt"]],
)
def test_usage_errors(capsys, argv):
    assert _run(capsys, *argv)[0] == USAGE


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("EVOSYM_SEED", "11")
    _, out, _ = _run(capsys, "rank", "Dt", "--output", "machine")
    assert json.loads(out)["seed"] == 11
    monkeypatch.setenv("EVOSYM_SEED", "eleven")
    assert _run(capsys, "rank", "Dt")[0] == USAGE


def test_indeterminate_exit(capsys):
    code, _, _ = _run(capsys, "check-invariance", "Du", "--F", "1", "--G", "ln(-u - x)*u1")
    assert code in (INDETERMINATE, FAIL)
