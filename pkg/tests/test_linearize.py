from pathlib import Path

import pytest

from evosym.catalog import load
from evosym.linearize import flag_linearizing
from evosym.vectorfield import Realization

FIXTURES = Path(__file__).parent / "fixtures" / "linearizing.cat"


@pytest.mark.parametrize("entry", load([FIXTURES]), ids=lambda e: e.id)
def test_fixture_verdicts(entry):
    verdict = flag_linearizing(entry.realization(entry.context()))
    assert verdict.linearizing == (entry.expect == "linearizing")


def test_rank_one_triple_is_named():
    v = flag_linearizing(Realization.parse("Du ; x*Du ; x^2*Du"))
    assert v.linearizing and v.reason == "rank1_solvable_3d" and v.subset == ("e1", "e2", "e3")


def test_translations_with_scaling_are_not_flagged():
    assert not flag_linearizing(Realization.parse("Dt ; Dx ; Du ; t*Dt + x*Dx + u*Du")).linearizing


def test_abelian_four():
    # rank two everywhere, so no rank-one triple can fire first
    v = flag_linearizing(Realization.parse("Dx ; Du ; t*Dx ; t*Du"))
    assert v.linearizing and v.reason == "abelian_ge4"


def test_combination_subalgebra():
    v = flag_linearizing(Realization.parse("Dx ; x*Dx + u*Du ; u*Dx ; -u*Du"))
    assert str(v) == "linearizing rank1_solvable_3d <e1, e3, e2 + e4>"


def test_small_realizations_are_never_flagged():
    assert not flag_linearizing(Realization.parse("Du ; x*Du")).linearizing
