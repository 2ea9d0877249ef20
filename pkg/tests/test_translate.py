"""Statement-by-statement translation checks against the frozen table."""

import pytest

from golden_translation import GOLDEN, PREAMBLE

from ketab import dlmodel as dl
from ketab.errors import CapacityError, TranslationError
from ketab.formulas import Universal, formula_sexpr, lit_sexpr, universal_sexpr
from ketab.parser import parse_kb, parse_query
from ketab.translate import (
    _facet_expr_universal, background, collect_signature, decode_element,
    encode_substitution, facet_expansion, translate_kb, translate_query,
    translate_statement,
)


def render(tr):
    if isinstance(tr, Universal):
        return universal_sexpr(tr)
    return " ".join(lit_sexpr(l) for l in tr)


def translate_line(line):
    kb = parse_kb(PREAMBLE + "\n" + line)
    assert len(kb.statements) == 1
    return translate_statement(kb.statements[0])


@pytest.mark.parametrize("name,line,expected,guarded",
                         GOLDEN, ids=[g[0] for g in GOLDEN])
def test_golden_entry(name, line, expected, guarded):
    assert render(translate_line(line)) == expected


@pytest.mark.parametrize("name,line,expected,guarded",
                         GOLDEN, ids=[g[0] for g in GOLDEN])
def test_guard_flag_matches_rendering(name, line, expected, guarded):
    has_guard = "(not (in z1 S[I]))" in expected or \
        "(not (in z2 S[I]))" in expected or \
        "(not (in z1 S[D]))" in expected or \
        "(not (in z2 S[D]))" in expected
    assert has_guard == guarded


def test_translation_is_deterministic():
    for _, line, expected, _ in GOLDEN:
        assert render(translate_line(line)) == expected


@pytest.mark.parametrize("line", [
    "axiom C1 sub C2.",
    "axiom C1 sub C2 or C3.",
    "axiom sym(R1).",
    "axiom asym(R1).",
    "axiom tra(R1).",
    "axiom C1 equiv not (C2 or C3).",
    "axiom R1 equiv inv(R2) or R3.",
    "axiom f1 sub f2.",
])
def test_unnormalized_forms_are_rejected(line):
    with pytest.raises(TranslationError):
        translate_line(line)


# ---------------------------------------------------------------------------
# background constraint structure

BG_KB = """\
concept A.
arole R.
crole T.
individual a.
datatype d { constants e1; facets f1, f2; }
datatype d2 { constants g1; facets h1; }

assert a : A.
"""


def bg_for(text):
    kb = parse_kb(text)
    return background(collect_signature(kb))


def group_sexprs(groups, tag):
    return [universal_sexpr(u) for t, u in groups if t == tag]


def test_partition_group():
    ground, groups, witnesses = bg_for(BG_KB)
    assert group_sexprs(groups, "partition") == [
        "(forall (z1) (and (or (not (in z1 S[I])) (not (in z1 S[D])))"
        " (or (in z1 S[D]) (in z1 S[I]))))",
        "(forall (z1) (or (in z1 S[I]) (in z1 S[D])))",
    ]
    glits = [lit_sexpr(l) for l in ground]
    assert "(in x[__wI] S[I])" in glits
    assert "(in x[__wD] S[D])" in glits
    assert witnesses[0].label == "x[__wI]"
    assert witnesses[1].label == "x[__wD]"


def test_top_bottom_group():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "top-bot") == [
        "(forall (z1) (and (or (not (in z1 S[I])) (in z1 S[top]))"
        " (or (not (in z1 S[top])) (in z1 S[I]))))",
        "(forall (z1) (not (in z1 S[bot])))",
    ]


def test_concept_domain_group():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "concept-dom") == [
        "(forall (z1) (or (not (in z1 S[A])) (in z1 S[I])))",
    ]


def test_datatype_domain_group():
    ground, groups, witnesses = bg_for(BG_KB)
    texts = group_sexprs(groups, "datatype-dom")
    assert texts == [
        "(forall (z1) (or (not (in z1 S[d])) (in z1 S[D])))",
        "(forall (z1) (or (not (in z1 S[d2])) (in z1 S[D])))",
        "(forall (z1) (or (not (in z1 S[d])) (not (in z1 S[d2]))))",
    ]
    # disjointness only: no clause forces every data element into a datatype
    from ketab.formulas import MemSet
    for _, u in groups:
        for c in u.clauses:
            assert not all(
                l.positive and isinstance(l.atom, MemSet)
                and l.atom.s.key[0] == "dt" for l in c)
    glits = [lit_sexpr(l) for l in ground]
    assert "(in x[__w_d] S[d])" in glits
    assert "(in x[__w_d2] S[d2])" in glits
    assert [w.label for w in witnesses] == [
        "x[__wI]", "x[__wD]", "x[__w_d]", "x[__w_d2]"]


def test_datatype_top_bottom_group():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "datatype-top-bot") == [
        "(forall (z1) (and (or (not (in z1 S[d])) (in z1 S[top(d)]))"
        " (or (not (in z1 S[top(d)])) (in z1 S[d]))))",
        "(forall (z1) (not (in z1 S[bot(d)])))",
        "(forall (z1) (and (or (not (in z1 S[d2])) (in z1 S[top(d2)]))"
        " (or (not (in z1 S[top(d2)])) (in z1 S[d2]))))",
        "(forall (z1) (not (in z1 S[bot(d2)])))",
    ]


def test_facet_domain_group():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "facet-dom") == [
        "(forall (z1) (or (not (in z1 S[f1])) (in z1 S[d])))",
        "(forall (z1) (or (not (in z1 S[f2])) (in z1 S[d])))",
        "(forall (z1) (or (not (in z1 S[h1])) (in z1 S[d2])))",
    ]


def test_universal_relation_group():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "universal-rel") == [
        "(forall (z1 z2) (and"
        " (or (not (in z1 S[I])) (not (in z2 S[I])) (rel z1 z2 R[U]))"
        " (or (not (rel z1 z2 R[U])) (in z1 S[I]))"
        " (or (not (rel z1 z2 R[U])) (in z2 S[I]))))",
    ]


def test_role_typing_groups():
    _, groups, _ = bg_for(BG_KB)
    assert group_sexprs(groups, "arole-typing") == [
        "(forall (z1 z2) (and (or (not (rel z1 z2 R[R])) (in z1 S[I]))"
        " (or (not (rel z1 z2 R[R])) (in z2 S[I]))))",
    ]
    assert group_sexprs(groups, "crole-typing") == [
        "(forall (z1 z2) (and (or (not (rel z1 z2 R[T])) (in z1 S[I]))"
        " (or (not (rel z1 z2 R[T])) (in z2 S[D]))))",
    ]


def test_named_element_units():
    ground, _, _ = bg_for(BG_KB)
    glits = [lit_sexpr(l) for l in ground]
    assert "(in x[a] S[I])" in glits
    assert "(in x[e1] S[d])" in glits
    assert "(in x[g1] S[d2])" in glits


def test_finite_set_groups():
    kb_text = BG_KB + "individual b.\naxiom A equiv {a, b}.\n"
    kb = parse_kb(kb_text)
    _, groups, _ = background(collect_signature(kb))
    noms = group_sexprs(groups, "finite-sets")
    assert noms == [
        "(forall (z1) (and"
        " (or (not (in z1 S[{a,b}])) (eq z1 x[a]) (eq z1 x[b]))"
        " (or (not (eq z1 x[a])) (in z1 S[{a,b}]))"
        " (or (not (eq z1 x[b])) (in z1 S[{a,b}]))))",
    ]


def test_enum_group():
    kb = parse_kb(PREAMBLE + "\naxiom d equiv {e1, e2}.")
    _, groups, _ = background(collect_signature(kb))
    assert group_sexprs(groups, "finite-sets") == [
        "(forall (z1) (and"
        " (or (not (in z1 S[{e1,e2}])) (eq z1 x[e1]) (eq z1 x[e2]))"
        " (or (not (eq z1 x[e1])) (in z1 S[{e1,e2}]))"
        " (or (not (eq z1 x[e2])) (in z1 S[{e1,e2}]))))",
    ]


def test_facet_expr_group():
    kb = parse_kb(PREAMBLE + "\nassert e1 : (f1 or not f2) and f2.")
    _, groups, _ = background(collect_signature(kb))
    texts = group_sexprs(groups, "facet-exprs")
    assert len(texts) == 1
    # forward: one clause per conjunct; backward: one choice clause
    # survives, the (not f2, f2) choice is tautological and dropped
    assert texts[0] == (
        "(forall (z1) (and"
        " (or (not (in z1 S[fx:d:f1|!f2&f2])) (in z1 S[d]))"
        " (or (not (in z1 S[fx:d:f1|!f2&f2])) (in z1 S[f1]) (not (in z1 S[f2])))"
        " (or (not (in z1 S[fx:d:f1|!f2&f2])) (in z1 S[f2]))"
        " (or (not (in z1 S[f1])) (not (in z1 S[f2]))"
        " (in z1 S[fx:d:f1|!f2&f2]) (not (in z1 S[d])))))"
    )


def test_plain_facet_needs_no_expr_group():
    kb = parse_kb(PREAMBLE + "\nassert e1 : f1.")
    _, groups, _ = background(collect_signature(kb))
    assert group_sexprs(groups, "facet-exprs") == []


def test_facet_expansion_cap():
    clause = (dl.FacetLit("facet", "f1", True), dl.FacetLit("facet", "f2", True))
    fe = dl.FacetExpr("d", tuple(clause for _ in range(13)))
    with pytest.raises(CapacityError):
        _facet_expr_universal(fe)


def test_facet_expansion_mirrors_cnf():
    kb = parse_kb(PREAMBLE + "\nassert e1 : (f1 or not f2) and top(d).")
    fe = kb.statements[0].data
    from ketab.formulas import bound_var, clause_sexpr
    z = bound_var(1)
    texts = [clause_sexpr(c) for c in facet_expansion(fe, z)]
    assert texts == [
        "(or (in z1 S[f1]) (not (in z1 S[f2])))",
        "(in z1 S[top(d)])",
    ]


# ---------------------------------------------------------------------------
# whole-KB assembly

def test_kb_formula_layout():
    kb = parse_kb(PREAMBLE + "\naxiom C1 equiv not C2.\nassert a : C1.")
    t = translate_kb(kb)
    # statement universals come before background ones, in statement order
    assert universal_sexpr(t.formula.universals[0]) == GOLDEN[5][2]
    assert [lit_sexpr(l) for l in t.formula.ground][0] == "(in x[a] S[C1])"
    tags = [tag for tag, _ in t.background_groups]
    assert tags == sorted(tags, key=["partition", "top-bot", "concept-dom",
                                     "datatype-dom", "datatype-top-bot",
                                     "facet-dom", "universal-rel",
                                     "arole-typing", "crole-typing",
                                     "finite-sets", "facet-exprs"].index)
    assert formula_sexpr(t.formula) == formula_sexpr(translate_kb(kb).formula)


def test_signature_collection_dedups():
    kb = parse_kb(PREAMBLE + "\naxiom C1 equiv {a, b}.\naxiom C2 equiv {a, b}."
                  "\naxiom C3 equiv {b, a}.")
    sig = collect_signature(kb)
    assert sig.nominal_sets == [("a", "b"), ("b", "a")]


def test_nested_atom_collection():
    kb = parse_kb(PREAMBLE + "\naxiom R1 equiv id({a, b}).")
    sig = collect_signature(kb)
    assert sig.nominal_sets == [("a", "b")]


# ---------------------------------------------------------------------------
# queries

def qkb():
    return parse_kb(PREAMBLE)


def test_query_literals():
    kb = qkb()
    q = parse_query("C1(?x) and not R1(?x, a) and P1(?x, ?u) and d(?u)"
                    " and not ?x = b and U(?x, ?y)", kb)
    texts = [lit_sexpr(l) for l in translate_query(q)]
    assert texts == [
        "(in x[?x] S[C1])",
        "(not (rel x[?x] x[a] R[R1]))",
        "(rel x[?x] x[?u] R[P1])",
        "(in x[?u] S[d])",
        "(not (eq x[?x] x[b]))",
        "(rel x[?x] x[?y] R[U])",
    ]


def test_substitution_encoding():
    kb = qkb()
    q = parse_query("C1(?x) and P1(?x, ?u)", kb)
    enc = encode_substitution(
        {"x": dl.QTerm("ind", "a", "a"), "u": dl.QTerm("const", "e1", "c")}, q)
    pairs = {k.label: v.label for k, v in enc.items()}
    assert pairs == {"x[?x]": "x[a]", "x[?u]": "x[e1]"}


def test_element_decoding():
    from ketab.translate import WIT_IND, const_elem, ind_elem, query_elem
    assert decode_element(ind_elem("a")) == ("ind", "a")
    assert decode_element(const_elem("e1")) == ("const", "e1")
    assert decode_element(query_elem("x", "a")) == ("var", "x")
    assert decode_element(WIT_IND) is None
