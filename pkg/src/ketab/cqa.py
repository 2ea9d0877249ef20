"""Answer sets of conjunctive queries over a ground clause set.

An assignment of the query variables to element variables is an answer
when the clause set stays satisfiable with the instantiated query
literals conjoined.  Two independent paths compute the same set.

The direct path appends the instantiated literals as unit clauses and
saturates, once per candidate assignment: k**n satisfiability tests for
k elements and n variables.

The branch path reuses one fully explored tableau.  Every open
saturated branch is walked by a decision tree whose nodes hold a
partial assignment together with a copy of the branch extended by the
literals chosen so far; a conjunct extends a node with every assignment
of its unbound variables that keeps the copy open.  A branch therefore
accepts exactly the assignments whose instantiated literals are jointly
coherent with its decided literals.  The union over open branches
equals the direct path's set: a model of the extended clause set steers
down the tableau to an open branch whose decisions it agrees with, and
there the query literals survive; conversely an accepting copy is
itself satisfiable, by making true precisely its stored literals.
Matching only literals already present on the branch would miss
answers whose atoms no clause ever forced a decision on.

Positive membership conjuncts are processed before negative and
equality conjuncts.  The answer set is independent of the conjunct
order; only the tree shape changes.
"""

from __future__ import annotations

import itertools

from .formulas import ElemVar, EqAtom, Lit, atom_elem_vars, subst_atom
from .ground import GroundProblem
from .tableau import Branch, TableauResult, saturate
from .translate import decode_element, query_var_sort


def conjunct_order(lits: tuple[Lit, ...]) -> tuple[int, ...]:
    """Processing order: positive membership literals first, then
    negative and equality literals, both groups in input order."""
    first = [i for i, l in enumerate(lits)
             if l.positive and not isinstance(l.atom, EqAtom)]
    rest = [i for i in range(len(lits)) if i not in first]
    return tuple(first + rest)


def query_variables(problem: GroundProblem,
                    lits: tuple[Lit, ...]) -> tuple[ElemVar, ...]:
    """Variables of the literals outside the problem's element universe,
    in first-occurrence order."""
    out: dict[ElemVar, None] = {}
    for lit in lits:
        for v in atom_elem_vars(lit.atom):
            if v not in problem.elem_ids:
                out.setdefault(v, None)
    return tuple(out)


def branch_answers(problem: GroundProblem, branch: Branch,
                   lits: tuple[Lit, ...],
                   variables: tuple[ElemVar, ...] | None = None) -> frozenset:
    """Assignments whose instantiated literals the branch tolerates."""
    if variables is None:
        variables = query_variables(problem, lits)
    ordered = [lits[i] for i in conjunct_order(lits)]
    answers: set[tuple] = set()

    def extend(i: int, subst: dict, b: Branch) -> None:
        if i == len(ordered):
            answers.add(tuple(subst[v] for v in variables))
            return
        lit = ordered[i]
        fresh = [v for v in atom_elem_vars(lit.atom)
                 if v not in subst and v not in problem.elem_ids]
        for tup in itertools.product(problem.elems, repeat=len(fresh)):
            s2 = {**subst, **dict(zip(fresh, tup))}
            code = problem.encode_lit(Lit(subst_atom(lit.atom, s2),
                                          lit.positive))
            b2 = b.clone()
            if b2.add(code):
                extend(i + 1, s2, b2)

    extend(0, {}, branch.clone())
    return frozenset(answers)


def answer_set(problem: GroundProblem, result: TableauResult,
               lits: tuple[Lit, ...]) -> frozenset:
    """Union of the per-branch answers over all open branches."""
    if not result.complete:
        raise ValueError("answer sets need a fully explored tableau")
    variables = query_variables(problem, lits)
    out: set[tuple] = set()
    for b in result.open_branches:
        out |= branch_answers(problem, b, lits, variables)
    return frozenset(out)


def naive_answers(problem: GroundProblem, lits: tuple[Lit, ...],
                  threads: int = 1,
                  max_branches: int | None = None) -> frozenset:
    """One satisfiability test per candidate assignment."""
    variables = query_variables(problem, lits)
    answers: set[tuple] = set()
    for tup in itertools.product(problem.elems, repeat=len(variables)):
        m = dict(zip(variables, tup))
        units = tuple(Lit(subst_atom(l.atom, m), l.positive) for l in lits)
        res = saturate(problem.with_units(units), mode="sat",
                       threads=threads, max_branches=max_branches)
        if res.consistent:
            answers.add(tup)
    return frozenset(answers)


def map_back(variables: tuple[ElemVar, ...], answers: frozenset):
    """Variable names and name tuples at the source level.  Assignments
    that bind a nameless witness element, or an element of the wrong
    sort, are dropped."""
    names = tuple(decode_element(v)[1] for v in variables)
    wanted = tuple("ind" if query_var_sort(v) == "a" else "const"
                   for v in variables)
    kept: set[tuple] = set()
    for tup in answers:
        decoded = [decode_element(e) for e in tup]
        if any(d is None or d[0] != w for d, w in zip(decoded, wanted)):
            continue
        kept.add(tuple(d[1] for d in decoded))
    return names, frozenset(kept)


def render_answers(names: tuple[str, ...], tuples) -> list[str]:
    """One sorted line per answer, `v1=a, v2=b`; the empty assignment
    renders as an empty line."""
    return sorted(", ".join(f"{n}={v}" for n, v in zip(names, tup))
                  for tup in tuples)
