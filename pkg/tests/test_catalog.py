import json

import pytest

from evosym.catalog import CatalogError, load, loads, verify_all, verify_entry

TEXT = """
# a small catalog
entry k-r1
  algebra A3.3
  basis "Du" ; "x*Du" ; "-Dx"
end
entry k-e1
  realization k-r1
  func f(u2)
  F = "f(u2)" ; G = "0"
end
entry k-e2
  realization k-r1
  F = "1" ; G = "x*u1"
  expect discrepancy "x breaks the translation in x"
end
entry k-e3
  algebra A3.3
  expect absent "listed without a formula"
end
"""


def test_loads_and_kinds():
    es = loads(TEXT)
    assert [e.kind for e in es] == ["realization", "equation", "equation", "equation"]
    assert es[1].basis == es[0].basis and es[1].realization_of == "k-r1"
    assert es[3].dimension == 3 and es[3].basis == []


def test_verify_statuses():
    s = verify_all(loads(TEXT), seed=1)
    assert [r.status for r in s.reports] == ["pass", "pass", "discrepancy", "absent"]
    assert s.exit_code == 0
    assert s.reports[2].failed_checks


def test_unannotated_failure_sets_exit_code():
    text = TEXT.replace('  expect discrepancy "x breaks the translation in x"\n', "")
    s = verify_all(loads(text), seed=1)
    assert s.reports[2].status == "fail" and s.exit_code == 1


def test_sibling_match_is_recorded():
    text = TEXT + """
entry k-r2
  algebra A3.3
  basis "Du" ; "x*Du" ; "-Dx + t*Du"
end
entry k-e4
  realization k-r2
  F = "1" ; G = "0"
end
"""
    rep = {r.id: r for r in verify_all(loads(text), seed=1).reports}["k-e4"]
    assert rep.status == "fail" and rep.matches == "k-r1"


@pytest.mark.parametrize(
    "bad, fragment",
    [
        ('entry a\n  algebra A3.3\n  basis "Du" ; "x*Du"\nend', "dimension"),
        ('entry a\n  algebra A9.9\n  basis "Du"\nend', "A9.9"),
        ('entry a\n  colour blue\nend', "unknown keyword"),
        ('entry a\n  algebra A3.3\n  basis "Du" ; "x*Du" ; "-Dx"\n', "missing 'end'"),
        ('entry a\n  realization nowhere\nend', "unknown realization"),
        ('entry a\n  algebra A3.3\n  basis "Du" ; "x*Du" ; "-Dx"\n  expect discrepancy\nend', "needs a note"),
        ('entry a\n  algebra A3.3\n  basis "Du" ; "x*Du" ; "-Dx"\nend\nentry a\n  algebra A3.3\n  basis "Du" ; "x*Du" ; "-Dx"\nend', "duplicate id"),
    ],
)
def test_malformed_input_is_located(bad, fragment):
    with pytest.raises(CatalogError) as info:
        loads(bad, "bad.cat")
    assert "bad.cat:" in str(info.value) and fragment in str(info.value)


def test_parameters_and_constraints():
    text = """
entry p-r1
  algebra A3.7 param q in(0,1)
  basis "Du" ; "x*Du" ; "(1 - q)*x*Dx + u*Du"
end
entry p-r2
  algebra A3.7 param q fixed "1/2"
  basis "Du" ; "x*Du" ; "1/2*x*Dx + u*Du"
end
"""
    s = verify_all(loads(text), seed=2)
    assert [r.status for r in s.reports] == ["pass", "pass"]


def test_machine_report_is_json_and_seeded():
    s = verify_all(loads(TEXT), seed=4)
    lines = [json.loads(line) for line in s.machine().splitlines()]
    assert all(rec.get("seed") == 4 for rec in lines)
    assert "elapsed" not in lines[0]


def test_entry_errors_become_indeterminate():
    (e,) = loads('entry z\n  algebra A2.2\n  basis "Dx" ; "x*Dx"\n  F = "1" ; G = "ln(-u)"\nend')
    rep = verify_entry(e, seed=0)
    assert rep.status in ("indeterminate", "fail")


def test_packaged_catalog_loads(catalog):
    ids = [e.id for e in catalog]
    assert len(ids) == len(set(ids)) and len(ids) > 300
