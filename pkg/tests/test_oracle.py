"""Oracle tests: exhaustive model search and the direct clause check."""

import itertools

import pytest

from ketab.errors import BudgetError
from ketab.formulas import ElemVar, EqAtom, Lit, MemRel, MemSet, RelVar, SetVar
from ketab.ground import GroundProblem, ground_kb
from ketab.normalize import normalize_kb
from ketab.oracle import (
    brute_sat, data_pool, dl_answers, dl_consistent,
    enumerate_interpretations, query_candidates,
)
from ketab.parser import parse_kb, parse_query
from ketab.tableau import saturate
from ketab.translate import translate_kb


def kb(text):
    return parse_kb(text)


# ---------------------------------------------------------------------------
# consistency verdicts over the raw vocabulary

VERDICTS = [
    ("plain", "concept A. individual a. assert a : A.", True),
    ("bottom", "concept A. individual a. axiom A equiv bot. assert a : A.",
     False),
    ("disjoint", """concept A, B. individual a. axiom A sub not B.
        assert a : A. assert a : B.""", False),
    ("gci", """concept A, B. individual a. axiom A sub B.
        assert a : A. assert a : not B.""", False),
    ("neq-needs-two", "individual a, b. assert a != b.", True),
    ("eq-merge", "individual a, b. assert a = b.", True),
    ("eq-and-neq", "individual a, b. assert a = b. assert a != b.", False),
    ("nominal", """concept A. individual a, b. axiom A equiv {a}.
        assert b : A. assert a != b.""", False),
    ("sym", """arole R. individual a, b. axiom sym(R).
        assert (a, b) : R. assert (b, a) : not R.""", False),
    ("tra", """arole R. individual a, b. axiom tra(R).
        assert (a, b) : R. assert (b, a) : R.
        assert (a, a) : not R.""", False),
    ("ref-irref", "arole R. axiom ref(R). axiom irref(R).", False),
    ("asym", """arole R. individual a, b. axiom asym(R).
        assert (a, b) : R. assert (b, a) : R.""", False),
    ("asym-self", """arole R. individual a. axiom asym(R).
        assert (a, a) : R.""", False),
    ("fun-merges", """arole R. individual a, b. axiom fun(R).
        assert (a, a) : R. assert (a, b) : R.""", True),
    ("fun-neq", """arole R. individual a, b. axiom fun(R).
        assert (a, a) : R. assert (a, b) : R. assert a != b.""", False),
    ("allvalues", """concept A, B. arole R. individual a, b.
        axiom A sub all R B. assert a : A. assert (a, b) : R.
        assert b : not B.""", False),
    ("exists-sub", """concept A, B. arole R. individual a, b.
        axiom some R B sub A. assert (a, b) : R. assert b : B.
        assert a : not A.""", False),
    ("mincard-merges", """concept A. arole R. individual a, b.
        axiom atleast 2 R top sub A. assert (a, a) : R.
        assert (a, b) : R. assert a : not A.""", True),
    ("mincard-neq", """concept A. arole R. individual a, b.
        axiom atleast 2 R top sub A. assert (a, a) : R.
        assert (a, b) : R. assert a != b. assert a : not A.""", False),
    ("maxcard", """concept A. arole R. individual a, b.
        axiom A sub atmost 1 R top. assert a : A. assert (a, a) : R.
        assert (a, b) : R. assert a != b.""", False),
    ("self", """concept A. arole R. individual a.
        axiom A equiv some R self. assert a : A.
        assert (a, a) : not R.""", False),
    ("value", """concept A. arole R. individual a, b.
        axiom A equiv some R {b}. assert a : A.
        assert (a, b) : not R.""", False),
    ("chain", """arole R, S. individual a, b. axiom R, R sub S.
        assert (a, b) : R. assert (b, a) : R.
        assert (a, a) : not S.""", False),
    ("prod", """concept A, B. arole R. individual a, b.
        axiom R equiv A prod B. assert a : A. assert b : B.
        assert (a, b) : not R.""", False),
    ("role-dis", """arole R, S. individual a, b. axiom dis(R, S).
        assert (a, b) : R. assert (a, b) : S.""", False),
    ("crole-fun-constants", """crole P. individual a.
        datatype d { constants e1, e2; }
        axiom fun(P). assert (a, e1) : P. assert (a, e2) : P.""", False),
    ("data-enum", """datatype d { constants e1, e2; }
        axiom d sub {e1}.""", False),
    ("datatype-disjoint", """datatype d { constants e1; }
        datatype d2 { constants g1; } axiom d sub d2.""", False),
    ("facet-both", """datatype d { constants e1; facets f; }
        assert e1 : f. assert e1 : not f.""", False),
    ("facet-free", """datatype d { constants e1; facets f; }
        assert e1 : f.""", True),
    ("datavalue", """concept A. crole P. individual a.
        datatype d { constants e1; } axiom A equiv some P {e1}.
        assert a : A. assert (a, e1) : not P.""", False),
]


@pytest.mark.parametrize("name,text,expect",
                         VERDICTS, ids=[v[0] for v in VERDICTS])
def test_consistency_verdict(name, text, expect):
    assert dl_consistent(kb(text)) is expect


def test_search_covers_domain_sizes():
    # one element is enough here, two are required there
    one = kb("individual a, b. assert a = b.")
    two = kb("individual a, b. assert a != b.")
    assert len(next(enumerate_interpretations(one)).domain) == 1
    models = enumerate_interpretations(two)
    first = next(m for m in models if m.inds["a"] != m.inds["b"])
    assert len(first.domain) >= 2


def test_data_pool_contents():
    k = kb("datatype d { constants e1, e2; } datatype d2 { constants g1; }")
    assert data_pool(k) == ("e1", "e2", "g1", "~d", "~d2", "~")


def test_budget_error():
    text = """concept A, B, C. arole R, S. individual a, b.
        assert a : A."""
    with pytest.raises(BudgetError, match="assignments"):
        # force a full sweep with an unsatisfiable statement at the end
        list(enumerate_interpretations(
            kb(text + " axiom U sub R. axiom dis(U, R)."), limit=50))


# ---------------------------------------------------------------------------
# query answers: substitutions holding in some model

ANSWER_KB = """
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


def answers(kb_text, query_text):
    k = kb(kb_text)
    q = parse_query(query_text, k)
    got = dl_answers(k, q)
    return {tuple(t.name for t in cand) for cand in got}


def test_answers_direct_and_derived():
    # A(b) would push b into B, which is denied outright
    assert answers(ANSWER_KB, "A(?x)") == {("a",)}
    assert answers(ANSWER_KB, "B(?x)") == {("a",)}
    assert answers(ANSWER_KB, "R(?x, ?y)") == {("a", "b"), ("a", "a")}
    assert answers(ANSWER_KB, "A(?x) and R(?x, ?y)") == {
        ("a", "b"), ("a", "a")}


def test_unconstrained_atoms_are_answerable():
    text = "concept A. individual a, b. assert a : A."
    assert answers(text, "A(?x)") == {("a",), ("b",)}


def test_universal_role_answers():
    assert answers(ANSWER_KB, "U(?x, ?y)") == {
        ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}


def test_negative_literal_answers():
    # a sits in A and hence in B in every model; b never does
    assert answers(ANSWER_KB, "not B(?x)") == {("b",)}


def test_equality_answers():
    text = "individual a, b. assert a = b."
    assert answers(text, "?x = b") == {("a",), ("b",)}
    # without an inequality the names may still denote one element
    assert answers("individual a, b.", "?x = b") == {("a",), ("b",)}
    assert answers("individual a, b. assert a != b.", "?x = b") == {("b",)}


def test_ground_query_possibility():
    assert answers(ANSWER_KB, "B(a)") == {()}
    assert answers(ANSWER_KB, "B(b)") == set()


def test_inconsistent_kb_has_no_answers():
    text = "concept A. individual a, b. axiom A equiv bot. assert a : A."
    assert answers(text, "A(?x)") == set()


def test_concrete_answers():
    text = """crole P. individual a.
        datatype d { constants e1, e2; }
        assert (a, e1) : P. assert (a, e2) : not P."""
    assert answers(text, "P(?x, ?u)") == {("a", "e1")}
    assert answers(text, "d(?u)") == {("e1",), ("e2",)}


def test_candidate_pools_respect_sorts():
    k = kb("""crole P. individual a, b.
        datatype d { constants e1; } assert (a, e1) : P.""")
    q = parse_query("P(?x, ?u)", k)
    variables, cands = query_candidates(k, q)
    assert [v.sort for v in variables] == ["a", "c"]
    assert {tuple(t.name for t in c) for c in cands} == {
        ("a", "e1"), ("b", "e1")}


# ---------------------------------------------------------------------------
# the direct clause check

A = SetVar(("concept", "A"), "S[A]")
B = SetVar(("concept", "B"), "S[B]")
R = RelVar(("arole", "R"), "R[R]")
XA = ElemVar(("ind", "a"), "x[a]")
XB = ElemVar(("ind", "b"), "x[b]")
XC = ElemVar(("ind", "c"), "x[c]")


def make_problem(clauses, elems=(XA, XB, XC)):
    p = GroundProblem(tuple(elems))
    for cl in clauses:
        p.add_clause(tuple(p.encode_lit(l) for l in cl))
    return p


def lit(atom, positive=True):
    return Lit(atom, positive)


Aa, Ab, Ba = lit(MemSet(XA, A)), lit(MemSet(XB, A)), lit(MemSet(XA, B))


def test_brute_sat_agrees_with_tableau_on_small_problems():
    cases = [
        [(Aa, Ab), (Aa.negate(),)],
        [(Aa,), (Aa.negate(),)],
        [(Aa, Ab), (Aa.negate(), Ab.negate())],
        [(Aa, Ba), (Aa.negate(), Ba), (Aa, Ba.negate()),
         (Aa.negate(), Ba.negate())],
        [(lit(EqAtom(XA, XB)),), (lit(MemRel(XA, XC, R)),),
         (lit(MemRel(XB, XC, R), False),)],
        [(lit(EqAtom(XA, XB)),), (Aa,), (Ab,)],
        [(lit(EqAtom(XA, XB)), lit(EqAtom(XB, XC))),
         (lit(MemRel(XA, XC, R)),), (lit(MemRel(XB, XC, R), False),)],
    ]
    for cls in cases:
        p = make_problem(cls)
        q = make_problem(cls)
        assert brute_sat(p) is saturate(q, mode="sat").consistent


def test_brute_sat_matches_exhaustive_truth_tables():
    # no equalities: compare against a plain product enumeration
    atoms = [MemSet(XA, A), MemSet(XB, A), MemSet(XA, B)]
    lits = [lit(a) for a in atoms] + [lit(a, False) for a in atoms]
    rng_cases = itertools.islice(
        itertools.combinations(itertools.combinations(lits, 2), 3), 40)
    for case in rng_cases:
        p = make_problem([tuple(cl) for cl in case])
        expected = any(
            all(any((l.atom in true_set) == l.positive for l in cl)
                for cl in case)
            for n in range(len(atoms) + 1)
            for true_set in map(frozenset,
                                itertools.combinations(atoms, n)))
        assert brute_sat(p) is expected, case


def test_brute_sat_transitivity_of_identifications():
    # a=b and b=c true forces a=c: the non-closed choice must be skipped
    p = make_problem([(lit(EqAtom(XA, XB)),), (lit(EqAtom(XB, XC)),),
                      (lit(EqAtom(XA, XC), False),)])
    assert brute_sat(p) is False


def test_brute_sat_empty_clause():
    p = make_problem([])
    p.add_clause(())
    assert brute_sat(p) is False


def test_brute_sat_budget():
    many = [lit(MemSet(XA, SetVar(("concept", f"C{k}"), f"S[C{k}]")))
            for k in range(6)]
    p = make_problem([tuple(many)])
    with pytest.raises(BudgetError, match="budget"):
        brute_sat(p, bit_budget=5)
    assert brute_sat(p, bit_budget=6)


# ---------------------------------------------------------------------------
# cross-checks between the pipelines

CROSS_KBS = [v[1] for v in VERDICTS][:18]


@pytest.mark.parametrize("text", CROSS_KBS,
                         ids=[v[0] for v in VERDICTS][:18])
def test_normalization_preserves_consistency(text):
    k = kb(text)
    assert dl_consistent(k) is dl_consistent(normalize_kb(k))


@pytest.mark.parametrize("text", CROSS_KBS,
                         ids=[v[0] for v in VERDICTS][:18])
def test_tableau_matches_model_search(text):
    k = kb(text)
    problem = ground_kb(translate_kb(normalize_kb(k)).formula)
    assert saturate(problem, mode="sat").consistent is dl_consistent(k)
