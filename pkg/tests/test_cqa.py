"""Answer sets: the branch path against the per-candidate path, and both
against the exhaustive model search."""

import itertools

import pytest

from ketab.cqa import (
    answer_set, branch_answers, conjunct_order, map_back, naive_answers,
    query_variables, render_answers,
)
from ketab.dlmodel import Query
from ketab.formulas import Lit, subst_atom
from ketab.ground import ground_kb
from ketab.normalize import normalize_kb
from ketab.oracle import dl_answers
from ketab.parser import parse_kb, parse_query
from ketab.tableau import extract_model, lit_true_in_model, model_satisfies, saturate
from ketab.translate import translate_kb, translate_query


def pipeline(text):
    kb = parse_kb(text)
    problem = ground_kb(translate_kb(normalize_kb(kb)).formula)
    return kb, problem


def both_raw(kb, problem, query_text):
    """Answers from both engines, asserted equal, as raw element tuples."""
    lits = translate_query(parse_query(query_text, kb))
    result = saturate(problem, mode="all")
    from_branches = answer_set(problem, result, lits)
    from_tests = naive_answers(problem, lits)
    assert from_branches == from_tests
    return query_variables(problem, lits), from_branches


def mapped(kb, problem, query_text):
    variables, raw = both_raw(kb, problem, query_text)
    names, kept = map_back(variables, raw)
    return names, kept


PINNED = """
concept A, B.
arole R.
individual a, b.
axiom A sub B.
assert a : A.
assert b : not B.
assert (a, b) : R.
assert (b, a) : not R.
assert (b, b) : not R.
"""


def test_positive_queries():
    kb, p = pipeline(PINNED)
    assert mapped(kb, p, "A(?x)")[1] == {("a",)}
    assert mapped(kb, p, "B(?x)")[1] == {("a",)}
    assert mapped(kb, p, "R(?x, ?y)")[1] == {("a", "b"), ("a", "a")}
    assert mapped(kb, p, "A(?x) and R(?x, ?y)")[1] == {("a", "b"), ("a", "a")}


def test_unconstrained_atom_is_answerable_everywhere():
    # no clause ever decides A at b, yet some model puts b in A; the
    # branch walk must not demand a literal already on the branch
    kb, p = pipeline("concept A. individual a, b. assert a : A.")
    assert mapped(kb, p, "A(?x)")[1] == {("a",), ("b",)}


def test_negative_query():
    kb, p = pipeline(PINNED)
    assert mapped(kb, p, "not B(?x)")[1] == {("b",)}
    assert mapped(kb, p, "not R(?x, b)")[1] == {("b",)}


def test_equality_queries():
    kb, p = pipeline("individual a, b. assert a = b.")
    assert mapped(kb, p, "?x = b")[1] == {("a",), ("b",)}
    kb, p = pipeline("individual a, b.")
    # names may denote one element: no unique-name assumption
    assert mapped(kb, p, "?x = b")[1] == {("a",), ("b",)}
    kb, p = pipeline("individual a, b. assert a != b.")
    assert mapped(kb, p, "?x = b")[1] == {("b",)}


def test_ground_queries():
    kb, p = pipeline(PINNED)
    assert mapped(kb, p, "B(a)")[1] == {()}
    assert mapped(kb, p, "not B(a)")[1] == set()
    assert mapped(kb, p, "A(b)")[1] == set()
    assert mapped(kb, p, "not A(b)")[1] == {()}


def test_inconsistent_kb_has_empty_answer_set():
    kb, p = pipeline("concept A. individual a, b. "
                     "axiom A equiv bot. assert a : A.")
    names, kept = mapped(kb, p, "A(?x)")
    assert kept == set()


def test_functional_role_pins_two_variable_query():
    kb, p = pipeline("""concept A. arole R. individual a, b.
        axiom fun(R).
        assert (a, b) : R.
        assert (a, a) : not R. assert (b, a) : not R.
        assert (b, b) : not R.""")
    assert mapped(kb, p, "R(?x, ?y)")[1] == {("a", "b")}


def test_witness_bindings_stay_raw():
    kb, p = pipeline("individual a. datatype d { constants e1, e2; }")
    variables, raw = both_raw(kb, p, "d(?u)")
    names, kept = map_back(variables, raw)
    assert kept == {("e1",), ("e2",)}
    # the two datatype constants, the datatype's witness, the data-sort
    # witness: all satisfiable bindings, only named ones survive
    assert len(raw) == 4


def test_wrong_sort_bindings_are_dropped():
    kb, p = pipeline("individual a, b. datatype d { constants e1; }")
    variables, raw = both_raw(kb, p, "?x = ?y")
    names, kept = map_back(variables, raw)
    # both variables default to the abstract sort
    assert kept == {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
    assert any(e.label == "x[e1]" for tup in raw for e in tup)


def test_conjunct_order_puts_positives_first():
    kb, _ = pipeline(PINNED)
    lits = translate_query(parse_query("not B(?x) and A(?x) and ?x = a", kb))
    assert conjunct_order(lits) == (1, 0, 2)


def test_answer_order_independence():
    kb, p = pipeline(PINNED)
    q = parse_query("A(?x) and not B(?y) and R(?x, ?y)", kb)
    result = saturate(p, mode="all")
    seen = set()
    for perm in itertools.permutations(q.literals):
        lits = translate_query(Query(perm))
        variables = query_variables(p, lits)
        raw = answer_set(p, result, lits)
        seen.add(frozenset(frozenset(zip(variables, t)) for t in raw))
    assert len(seen) == 1


def test_every_answer_extends_some_branch_to_a_model():
    kb, p = pipeline(PINNED)
    lits = translate_query(parse_query("A(?x) and R(?x, ?y)", kb))
    variables = query_variables(p, lits)
    result = saturate(p, mode="all")
    checked = 0
    for b in result.open_branches:
        for tup in branch_answers(p, b, lits, variables):
            m = dict(zip(variables, tup))
            ext = b.clone()
            ground = [Lit(subst_atom(l.atom, m), l.positive) for l in lits]
            assert all(ext.add(p.encode_lit(l)) for l in ground)
            model = extract_model(p, ext)
            assert model_satisfies(model, p)
            assert all(lit_true_in_model(model, l) for l in ground)
            checked += 1
    assert checked


def test_answer_set_requires_fully_explored_tableau():
    kb, p = pipeline("concept A, B. individual a. axiom top sub A or B.")
    partial = saturate(p, mode="sat")
    assert not partial.complete
    lits = translate_query(parse_query("A(?x)", kb))
    with pytest.raises(ValueError):
        answer_set(p, partial, lits)


def test_direct_path_leaves_the_problem_intact():
    kb, p = pipeline(PINNED)
    n_clauses = len(p.clauses)
    lits = translate_query(parse_query("A(?x)", kb))
    naive_answers(p, lits)
    assert len(p.clauses) == n_clauses


def test_render_answers():
    assert render_answers(("x", "y"), {("b", "a"), ("a", "b")}) == [
        "x=a, y=b", "x=b, y=a"]
    assert render_answers((), {()}) == [""]
    assert render_answers(("x",), set()) == []


CROSS = [
    (PINNED, "A(?x) and B(?x)"),
    (PINNED, "R(?x, ?y) and not R(?y, ?x)"),
    (PINNED, "U(?x, ?y)"),
    (PINNED, "?x = ?y and A(?x)"),
    ("concept A. individual a, b. axiom A equiv {a}.", "A(?x)"),
    ("concept A. individual a, b. axiom A equiv {a}.", "not A(?x)"),
    ("concept A, B. individual a. axiom A equiv not B.", "A(?x) and B(?x)"),
    ("arole R. individual a, b. axiom sym(R). assert (a, b) : R. "
     "assert a != b.", "R(?x, ?y)"),
    ("arole R. individual a, b. axiom tra(R). assert (a, b) : R. "
     "assert (b, a) : R. assert (a, a) : not R.", "R(?x, ?x)"),
    ("crole P. individual a. datatype d { constants e1, e2; } "
     "assert (a, e1) : P. assert (a, e2) : not P.", "P(?x, ?u)"),
    ("individual a. datatype d { constants e1, e2; }", "?u = e1"),
    ("individual a. datatype d { constants e1; facets f1; } "
     "assert e1 : f1.", "d(?u)"),
    ("concept A. arole R. individual a, b. axiom A sub all R A. "
     "assert a : A. assert (a, b) : R.", "not A(?x)"),
    ("concept A. arole R. individual a, b. axiom some R A sub A. "
     "assert a : A. assert (b, a) : R. assert b : not A.", "A(?x)"),
    ("concept A. individual a, b. axiom atleast 2 U A sub bot. "
     "assert a : A.", "A(?x)"),
]


@pytest.mark.parametrize("kb_text,query_text",
                         CROSS, ids=[f"c{i}" for i in range(len(CROSS))])
def test_both_engines_agree(kb_text, query_text):
    kb, p = pipeline(kb_text)
    both_raw(kb, p, query_text)


DL_AGREE = [
    (PINNED, "A(?x)"),
    (PINNED, "not B(?x)"),
    (PINNED, "A(?x) and R(?x, ?y)"),
    ("concept A. individual a, b. assert a : A.", "A(?x)"),
    ("concept A. individual a, b. axiom A equiv {a}.", "A(?x)"),
    ("individual a, b.", "?x = b"),
    ("individual a, b. assert a != b.", "?x = b"),
    ("individual a. datatype d { constants e1, e2; }", "?u = e1"),
    ("crole P. individual a. datatype d { constants e1, e2; } "
     "assert (a, e1) : P. assert (a, e2) : not P.", "P(?x, ?u)"),
    ("concept A. individual a, b. axiom A equiv bot. assert a : A.",
     "A(?x)"),
]


@pytest.mark.parametrize("kb_text,query_text",
                         DL_AGREE, ids=[f"d{i}" for i in range(len(DL_AGREE))])
def test_pipeline_matches_model_search(kb_text, query_text):
    kb, p = pipeline(kb_text)
    q = parse_query(query_text, kb)
    names, kept = mapped(kb, p, query_text)
    expected = {tuple(t.name for t in cand) for cand in dl_answers(kb, q)}
    assert kept == expected
