"""Whole-system acceptance checks.

Each test verifies one end-to-end property at its stated tolerance and
prints a single `[PASS]`/`[FAIL]` summary line with the measured
numbers.  The corpus fixture runs the full pipeline, with traces, over
two hundred generated knowledge bases; later tests reuse those runs.
"""

import random
import time
from types import SimpleNamespace

import pytest

from golden_translation import GOLDEN, PREAMBLE

from ketab.cqa import answer_set, map_back, naive_answers, query_variables
from ketab.errors import BudgetError
from ketab.formulas import Universal, alpha_rename, lit_sexpr, universal_sexpr
from ketab.genkb import FUZZ, corpus_pair, random_kb
from ketab.ground import ground_kb
from ketab.normalize import normalize_kb
from ketab.oracle import dl_consistent
from ketab.parser import parse_kb, parse_query
from ketab.tableau import audit_trace, extract_model, model_satisfies, saturate
from ketab.translate import translate_kb, translate_query, translate_statement

CORPUS_SIZE = 200
QUERY_PAIRS = 120
FUZZ_RUNS = 1000


def report(ok: bool, label: str, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def corpus():
    """Full pipeline runs, traced and fully explored, for every seed."""
    runs = []
    t0 = time.perf_counter()
    for seed in range(CORPUS_SIZE):
        kb_text, query_text = corpus_pair(seed)
        kb = parse_kb(kb_text)
        formula = translate_kb(normalize_kb(kb)).formula
        problem = ground_kb(formula)
        result = saturate(problem, mode="all", record_trace=True)
        runs.append(SimpleNamespace(
            seed=seed, kb_text=kb_text, query_text=query_text, kb=kb,
            formula=formula, problem=problem, result=result))
    return runs, time.perf_counter() - t0


def test_statement_translations_match_frozen_table():
    t0 = time.perf_counter()
    bad = []
    for name, line, expected, _ in GOLDEN:
        kb = parse_kb(PREAMBLE + "\n" + line)
        tr = translate_statement(kb.statements[0])
        if isinstance(tr, Universal):
            got = universal_sexpr(alpha_rename(tr))
        else:
            got = " ".join(lit_sexpr(l) for l in tr)
        if got != expected:
            bad.append(name)
    dt = time.perf_counter() - t0
    report(not bad and dt < 1.0, "statement translation table",
           f"{len(GOLDEN) - len(bad)}/{len(GOLDEN)} entries "
           f"alpha-equivalent in {dt:.2f}s" +
           (f"; mismatches: {bad[:5]}" if bad else ""))


def test_verdicts_agree_with_exhaustive_search(corpus):
    runs, build = corpus
    t0 = time.perf_counter()
    mismatches = []
    consistent = 0
    for run in runs:
        want = dl_consistent(normalize_kb(run.kb))
        consistent += bool(want)
        if want != run.result.consistent:
            mismatches.append(run.seed)
    total = build + time.perf_counter() - t0
    report(not mismatches and total < 300.0,
           "consistency verdicts against exhaustive search",
           f"{len(runs) - len(mismatches)}/{len(runs)} agree "
           f"({consistent} consistent, {len(runs) - consistent} "
           f"inconsistent) in {total:.1f}s" +
           (f"; mismatching seeds: {mismatches[:5]}" if mismatches else ""))


def test_both_query_paths_give_identical_answers(corpus):
    runs, _ = corpus
    mismatches = []
    slow = []
    pairs = 0
    for run in runs[:QUERY_PAIRS]:
        query = parse_query(run.query_text, run.kb)
        lits = translate_query(query)
        assert len(query_variables(run.problem, lits)) <= 2
        t0 = time.perf_counter()
        tableau = answer_set(run.problem, run.result, lits)
        naive = naive_answers(run.problem, lits)
        dt = time.perf_counter() - t0
        pairs += 1
        variables = query_variables(run.problem, lits)
        if map_back(variables, tableau) != map_back(variables, naive):
            mismatches.append(run.seed)
        if dt >= 10.0:
            slow.append((run.seed, round(dt, 1)))
    report(pairs >= 100 and not mismatches and not slow,
           "answer sets along both paths",
           f"{pairs - len(mismatches)}/{pairs} pairs identical, "
           f"all under 10s" +
           (f"; mismatching seeds: {mismatches[:5]}" if mismatches else "") +
           (f"; slow: {slow[:5]}" if slow else ""))


def test_grounding_and_search_stay_within_analytic_bounds(corpus):
    runs, _ = corpus
    violations = []
    for run in runs:
        s = run.problem.stats
        k = s.k
        ground_units = len(run.formula.ground)
        if any(count != k ** arity for arity, count in s.per_universal):
            violations.append((run.seed, "instances"))
        if s.clauses > s.m * k ** s.r + ground_units:
            violations.append((run.seed, "clauses"))
        depth_bound = s.l * s.m * k ** s.r + ground_units
        if run.result.depth > depth_bound:
            violations.append((run.seed, "depth"))
        if len(run.result.open_branches) > 2 ** depth_bound:
            violations.append((run.seed, "leaves"))
    report(not violations, "analytic count bounds",
           f"{len(runs)} runs: every universal grounds to k^q instances, "
           f"clause, depth and leaf bounds hold" +
           (f"; violations: {violations[:5]}" if violations else ""))


def test_open_branches_induce_models_of_the_clause_set(corpus):
    runs, _ = corpus
    violations = 0
    branches = 0
    for run in runs:
        for branch in run.result.open_branches:
            branches += 1
            model = extract_model(run.problem, branch)
            if not model_satisfies(model, run.problem):
                violations += 1
    report(violations == 0, "branch models",
           f"{branches} open branches all satisfy their clause set "
           f"({violations} violations)")


def test_splits_never_preempt_forced_literals(corpus):
    runs, _ = corpus
    events = 0
    for run in runs:
        events += audit_trace(run.problem, run.result.trace)
    report(True, "rule-application discipline",
           f"{events} trace events audited, no split while an "
           f"elimination step was applicable")


def test_random_inputs_terminate_cleanly():
    failures = []
    outcomes = {"consistent": 0, "inconsistent": 0, "budget": 0}
    worst = 0.0
    t0 = time.perf_counter()
    for i in range(FUZZ_RUNS):
        rng = random.Random(1_000_000 + i)
        text = random_kb(rng, FUZZ)
        t1 = time.perf_counter()
        try:
            problem = ground_kb(
                translate_kb(normalize_kb(parse_kb(text))).formula)
            trace = i % 25 == 0
            result = saturate(problem, mode="sat", record_trace=trace,
                              max_branches=500_000)
            if trace:
                audit_trace(problem, result.trace)
            outcomes["consistent" if result.consistent
                     else "inconsistent"] += 1
        except BudgetError:
            outcomes["budget"] += 1
        except Exception as e:  # noqa: BLE001 - any other failure counts
            failures.append((i, repr(e)))
        dt = time.perf_counter() - t1
        worst = max(worst, dt)
        if dt >= 30.0:
            failures.append((i, f"run took {dt:.1f}s"))
    total = time.perf_counter() - t0
    report(not failures, "fuzzed pipeline robustness",
           f"{FUZZ_RUNS} runs in {total:.1f}s, worst {worst:.2f}s, "
           f"outcomes {outcomes}" +
           (f"; failures: {failures[:5]}" if failures else ""))
