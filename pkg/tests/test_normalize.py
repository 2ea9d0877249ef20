"""Rewriting into the translator vocabulary."""

import pytest

from golden_translation import GOLDEN, PREAMBLE

from ketab import dlmodel as dl
from ketab.normalize import normalize_kb
from ketab.parser import parse_kb
from ketab.printer import kb_text, statement_text


def norm(text):
    return normalize_kb(parse_kb(PREAMBLE + "\n" + text))


def texts(kb):
    return [statement_text(s) for s in kb.statements]


def test_normalized_statements_pass_through():
    for name, line, _, _ in GOLDEN:
        kb = parse_kb(PREAMBLE + "\n" + line)
        nkb = normalize_kb(kb)
        assert nkb.statements == kb.statements, name
        assert nkb.concepts == kb.concepts
        assert nkb.aroles == kb.aroles


def test_everything_normalizes():
    nkb = norm("""
axiom C1 sub C2 or (C3 and not C1).
axiom sym(R1).
axiom tra(R2).
axiom some (inv R1) (C1 or C2) sub not C3.
axiom R1 equiv res(R2 and R3, C1, not C2).
axiom P1 equiv rres(P2 or P3, f1 or {e1}).
assert (a, e1) : not (P1 or P2).
assert b : atleast 3 (R1 or R2) {a, b} sub C1.
""".replace("assert b : atleast 3 (R1 or R2) {a, b} sub C1.",
            "axiom atleast 3 (R1 or R2) {a, b} sub C1."))
    for s in nkb.statements:
        assert dl.is_normalized(s)


def test_gci_expansion():
    nkb = norm("axiom C1 sub C2.")
    assert texts(nkb)[-3:] == [
        "axiom __n1 equiv not C1.",
        "axiom __n2 equiv __n1 or C2.",
        "axiom __n2 equiv top.",
    ]
    assert nkb.concepts[-2:] == ("__n1", "__n2")


def test_repeated_gci_reuses_names():
    nkb = norm("axiom C1 sub C2.\naxiom C1 sub C2.")
    assert texts(nkb) == [
        "axiom __n1 equiv not C1.",
        "axiom __n2 equiv __n1 or C2.",
        "axiom __n2 equiv top.",
        "axiom __n2 equiv top.",
    ]


def test_symmetry():
    nkb = norm("axiom sym(R1).")
    assert texts(nkb) == [
        "axiom __n1 equiv inv R1.",
        "axiom __n1 sub R1.",
    ]
    assert nkb.aroles[-1] == "__n1"


def test_asymmetry():
    nkb = norm("axiom asym(R1).")
    assert texts(nkb) == [
        "axiom __n1 equiv inv R1.",
        "axiom dis(R1, __n1).",
    ]


def test_transitivity():
    nkb = norm("axiom tra(R1).")
    assert texts(nkb) == ["axiom R1, R1 sub R1."]


def test_data_subsumption_is_a_union_equation():
    nkb = norm("axiom f1 sub f2.")
    assert texts(nkb) == ["axiom f2 equiv f2 or f1."]


def test_data_subsumption_without_facet_merge():
    nkb = norm("axiom {e1} sub d.")
    assert texts(nkb) == ["axiom d equiv d or {e1}."]


def test_concept_intersection_unfolds():
    nkb = norm("axiom C1 equiv C2 and C3.")
    assert texts(nkb) == [
        "axiom __n1 equiv not C2.",
        "axiom __n2 equiv not C3.",
        "axiom __n3 equiv __n1 or __n2.",
        "axiom C1 equiv not __n3.",
    ]


def test_equiv_orientation_swaps_to_the_name():
    nkb = norm("axiom top equiv C1.")
    assert texts(nkb) == ["axiom C1 equiv top."]


def test_equiv_with_no_name_gets_one():
    nkb = norm("axiom top equiv {a, b}.")
    assert texts(nkb) == [
        "axiom __n1 equiv top.",
        "axiom __n1 equiv {a, b}.",
    ]


def test_assertion_terms_are_named():
    nkb = norm("assert a : C1 and C2.")
    assert texts(nkb)[-1] == "assert a : __n4."
    for s in nkb.statements:
        assert dl.is_normalized(s)


def test_negative_composite_role_assertion():
    nkb = norm("assert (a, b) : not (R1 or R2).")
    assert texts(nkb) == [
        "axiom __n1 equiv R1 or R2.",
        "assert (a, b) : not __n1.",
    ]


def test_data_composites_get_datanames():
    nkb = norm("axiom d equiv (f1) or {e1, e2}.")
    assert nkb.datanames == ()
    nkb2 = norm("axiom d2 equiv not ((f1) or {e1}).")
    assert nkb2.datanames == ("__n1",)
    assert texts(nkb2) == [
        "axiom __n1 equiv f1 or {e1}.",
        "axiom d2 equiv not __n1.",
    ]


def test_facet_unions_merge_instead_of_naming():
    nkb = norm("axiom f1 and f2 sub not f1.")
    assert nkb.datanames == ()
    assert texts(nkb) == [
        "axiom not f1 equiv (not f1 or f1) and (not f1 or f2).",
    ]


def test_quantified_statement_arguments():
    nkb = norm("axiom some (R1 or R2) (C1 or C2) sub C3.")
    assert texts(nkb) == [
        "axiom __n1 equiv R1 or R2.",
        "axiom __n2 equiv C1 or C2.",
        "axiom some __n1 __n2 sub C3.",
    ]


def test_chain_links_resolve_to_names():
    nkb = norm("axiom inv R1, R2 sub R3.")
    assert texts(nkb) == [
        "axiom __n1 equiv inv R1.",
        "axiom __n1, R2 sub R3.",
    ]


def test_universal_role_in_chain_gets_a_name():
    nkb = norm("axiom U, R1 sub R2.")
    assert texts(nkb) == [
        "axiom __n1 equiv U.",
        "axiom __n1, R1 sub R2.",
    ]


def test_idempotent():
    nkb = norm("axiom C1 sub C2 and (C3 or not C1).\naxiom sym(R1).")
    again = normalize_kb(nkb)
    assert again == nkb


def test_normalized_output_reparses():
    nkb = norm("axiom C1 sub C2.\naxiom f1 sub f2 or {e1}.\naxiom asym(R2).")
    text = kb_text(nkb)
    rt = parse_kb(text, allow_generated=True)
    assert rt == nkb


def test_generated_names_rejected_in_user_input():
    from ketab.errors import ParseError
    with pytest.raises(ParseError):
        parse_kb("concept __n1.")
    with pytest.raises(ParseError):
        parse_kb("dataname x.")
