import pytest
import sympy as sp

from evosym.expr import Context, ParseError, t, u, x
from evosym.vectorfield import Realization, VectorField, bracket, generic_rank, parse_vf, vf_to_text, wedge_is_zero


def test_parse_collects_components():
    v = parse_vf("t*Dt + (x - u)*Dx - 3/2*Du")
    assert v.components == (t, x - u, sp.Rational(-3, 2))


def test_parse_grouped_operator():
    assert parse_vf("-(Dt + Dx)") == VectorField(-1, -1, 0)


@pytest.mark.parametrize("bad", ["x*Dt", "u1*Du", "Dx*Du", "x + Dx"])
def test_rejects_non_generators(bad):
    with pytest.raises((ParseError, ValueError)):
        parse_vf(bad)


def test_text_round_trip():
    v = parse_vf("t^2*Dt + x*u*Dx - Du")
    assert parse_vf(vf_to_text(v)) == v


def test_bracket_of_scaling_and_translation():
    assert bracket(parse_vf("Dt"), parse_vf("t*Dt + x*Dx")) == parse_vf("Dt")
    assert bracket(parse_vf("x*Du"), parse_vf("Dx")) == parse_vf("-Du")


def test_bracket_with_transcendental_coefficients():
    X = parse_vf("exp(x)*Du")
    Y = parse_vf("Dx + u*Du")
    assert bracket(X, Y) == VectorField(0, 0, 0)


def test_generic_rank():
    assert generic_rank(Realization.parse("Dt ; Dx ; Du")) == 3
    assert generic_rank(Realization.parse("Du ; x*Du ; x^2*Du")) == 1
    assert generic_rank(Realization.parse("Dx ; u*Dx ; Du")) == 2


def test_rank_with_parameters():
    ctx = Context.build(params=["q"])
    assert generic_rank(Realization.parse("Du ; x^q*Du", ctx)) == 1


def test_wedge():
    assert wedge_is_zero(parse_vf("Du"), parse_vf("x*Du"), parse_vf("Dx"))
    assert not wedge_is_zero(parse_vf("Dt"), parse_vf("Dx"), parse_vf("Du"))
