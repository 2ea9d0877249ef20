"""Command-line front end.

Wires the full pipeline: parse, normalize, translate, ground, saturate,
answer.  Subcommands:

    check <kb>                 consistency verdict (exit 0/1)
    query <kb> <query>         answer lines, one per substitution
    translate <kb>             the grounding-ready formula as s-expressions
    stats <kb>                 grounding statistics
    oracle <kb>                verdict from the exhaustive reference engine

Outputs are deterministic: identical inputs and flags give identical
bytes.  JSON payloads carry a schema version field ``"v": 1``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cqa import answer_set, conjunct_order, map_back, naive_answers, \
    query_variables, render_answers
from .errors import KetabError
from .formulas import formula_sexpr
from .ground import EXPANSION_BUDGET, ground_kb
from .normalize import normalize_kb
from .oracle import dl_consistent
from .parser import parse_kb, parse_query
from .printer import kb_text
from .tableau import saturate
from .translate import decode_element, translate_kb, translate_query


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-clauses", type=int, metavar="N",
                        default=EXPANSION_BUDGET,
                        help="abort grounding past N clause instances")
    common.add_argument("--budget-branches", type=int, metavar="N",
                        default=None,
                        help="abort the tableau past N branches")
    common.add_argument("--seed", type=int, metavar="N", default=None,
                        help="reserved for randomized corpus generation")
    common.add_argument("--trace", action="store_true",
                        help="log rule applications to stderr")
    common.add_argument("--json", action="store_true",
                        help="machine-readable output")
    common.add_argument("--threads", type=int, metavar="N", default=1,
                        help="tableau worker threads (default 1)")

    ap = argparse.ArgumentParser(
        prog="ketab",
        description="Consistency checking and conjunctive query answering "
                    "for a datatype description logic.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="decide knowledge-base consistency")
    p.add_argument("kb", help="knowledge-base file")

    p = sub.add_parser("query", parents=[common],
                       help="answer a conjunctive query")
    p.add_argument("kb", help="knowledge-base file")
    p.add_argument("query", help="query file")
    p.add_argument("--engine", choices=("tableau", "naive", "both"),
                   default="tableau",
                   help="answering strategy (default tableau)")
    p.add_argument("--raw", action="store_true",
                   help="keep internal bindings, including witnesses")

    p = sub.add_parser("translate", parents=[common],
                       help="print the set-theoretic translation")
    p.add_argument("kb", help="knowledge-base file")
    p.add_argument("--dump-normal", action="store_true",
                   help="prefix the normalized knowledge base as comments")

    p = sub.add_parser("stats", parents=[common],
                       help="print grounding statistics")
    p.add_argument("kb", help="knowledge-base file")

    p = sub.add_parser("oracle", parents=[common],
                       help="decide consistency by exhaustive enumeration")
    p.add_argument("kb", help="knowledge-base file")
    return ap


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _trace_out(trace) -> None:
    for ev in trace or ():
        print(" ".join(str(x) for x in ev), file=sys.stderr)


def _pipeline(a):
    kb = parse_kb(_read(a.kb))
    tr = translate_kb(normalize_kb(kb))
    problem = ground_kb(tr.formula, budget=a.budget_clauses)
    return kb, problem


def _cmd_check(a) -> int:
    _, problem = _pipeline(a)
    res = saturate(problem, mode="sat", record_trace=a.trace,
                   threads=a.threads, max_branches=a.budget_branches)
    if a.trace:
        _trace_out(res.trace)
    if a.json:
        print(json.dumps({"v": 1, "consistent": res.consistent}))
    else:
        print("consistent" if res.consistent else "inconsistent")
    return 0 if res.consistent else 1


def _raw_label(e) -> str:
    d = decode_element(e)
    return d[1] if d else e.label


def _answers(a, problem, lits):
    if a.engine in ("tableau", "both"):
        res = saturate(problem, mode="all", record_trace=a.trace,
                       threads=a.threads, max_branches=a.budget_branches)
        if a.trace:
            _trace_out(res.trace)
        tab = answer_set(problem, res, lits)
    if a.engine in ("naive", "both"):
        naive = naive_answers(problem, lits, threads=a.threads,
                              max_branches=a.budget_branches)
    if a.engine == "tableau":
        return tab, None
    if a.engine == "naive":
        return naive, None
    return tab, naive


def _cmd_query(a) -> int:
    kb, problem = _pipeline(a)
    lits = translate_query(parse_query(_read(a.query), kb))
    if a.trace:
        order = conjunct_order(lits)
        print("order " + ",".join(str(i) for i in order), file=sys.stderr)
    answers, other = _answers(a, problem, lits)
    if other is not None and answers != other:
        print("error: engines disagree: tableau found "
              f"{len(answers)} answers, naive found {len(other)}",
              file=sys.stderr)
        return 1
    variables = query_variables(problem, lits)
    if a.raw:
        names = tuple(_raw_label(v) for v in variables)
        tuples = {tuple(_raw_label(e) for e in tup) for tup in answers}
    else:
        names, tuples = map_back(variables, answers)
    lines = render_answers(names, tuples)
    if a.json:
        print(json.dumps({"v": 1, "variables": list(names),
                          "answers": sorted(list(t) for t in tuples)}))
    else:
        for line in lines:
            print(line)
    return 0


def _cmd_translate(a) -> int:
    kb = parse_kb(_read(a.kb))
    normal = normalize_kb(kb)
    if a.dump_normal:
        for line in kb_text(normal).splitlines():
            print("; " + line if line else ";")
    print(formula_sexpr(translate_kb(normal).formula))
    return 0


def _cmd_stats(a) -> int:
    _, problem = _pipeline(a)
    d = problem.stats.as_dict()
    if a.json:
        print(json.dumps(d))
    else:
        for key in ("k", "m", "r", "l", "clauses"):
            print(f"{key} = {d[key]}")
    return 0


def _cmd_oracle(a) -> int:
    kb = parse_kb(_read(a.kb))
    ok = dl_consistent(normalize_kb(kb))
    if a.json:
        print(json.dumps({"v": 1, "consistent": ok}))
    else:
        print("consistent" if ok else "inconsistent")
    return 0 if ok else 1


_COMMANDS = {
    "check": _cmd_check,
    "query": _cmd_query,
    "translate": _cmd_translate,
    "stats": _cmd_stats,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except KetabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
