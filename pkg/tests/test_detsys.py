import pytest
import sympy as sp

from evosym.detsys import EvolutionEquation, check_invariance, exact_defect, symmetry_defect
from evosym.expr import FuncSymbol, u, u1, u3
from evosym.vectorfield import parse_basis, parse_vf

KDV = EvolutionEquation(sp.S.One, u * u1)


def test_kdv_symmetries():
    basis = parse_basis("Dt ; Dx ; t*Dx - Du ; 3*t*Dt + x*Dx - 2*u*Du")
    rep = check_invariance(basis, KDV)
    assert rep.ok and rep.status == "pass"


def test_kdv_non_symmetries_report_witness():
    rep = check_invariance(parse_basis("t*Dx + Du ; x*Dx"), KDV)
    assert rep.status == "fail"
    for v in rep.verdicts:
        assert v.status == "fail" and v.failed and v.value != 0


def test_scaling_with_arbitrary_function():
    f = FuncSymbol("f", (u1,))
    eq = EvolutionEquation(f(), sp.S.Zero)
    assert check_invariance([parse_vf("Dt"), parse_vf("Dx"), parse_vf("Du")], eq).ok
    assert not check_invariance([parse_vf("x*Dx")], eq).ok


def test_exact_defect_of_translation():
    f = FuncSymbol("f", (u, u1))
    eq = EvolutionEquation(f(), u1**2)
    assert exact_defect(parse_vf("Du"), eq).d1 == -f.d(0)


def test_defects_never_contain_u3():
    pair = symmetry_defect(parse_vf("x^2*u*Dx + t*u^2*Du"), EvolutionEquation(u1**-3, u * u1))
    assert u3 not in pair.d1.free_symbols | pair.d2.free_symbols


def test_rejects_bad_equations():
    with pytest.raises(ValueError):
        EvolutionEquation(0, u)
    with pytest.raises(ValueError):
        EvolutionEquation(1, u3)
