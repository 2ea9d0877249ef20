"""Brute-force reference checks, independent of the clause translation.

Consistency is decided by exhaustive search over finite interpretations.
The search is exact for this language: no construct forces elements
beyond the named individuals plus one anonymous element, because every
quantified concept form sits on the non-creating side of its subsumption.
The data side likewise needs only the declared constants, one anonymous
value per datatype, and one extra value.

`brute_sat` checks a ground clause set by enumerating assignments
directly: element identifications first, then a Gray-code walk over the
remaining atoms, so each step flips a single atom.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import dlmodel as dl
from .errors import BudgetError
from .formulas import EqAtom
from .ground import GroundProblem

ORACLE_NODE_LIMIT = 4_000_000
BRUTE_BIT_BUDGET = 24


# ---------------------------------------------------------------------------
# interpretations

@dataclass
class Interpretation:
    """Finite interpretation: integers for abstract elements, strings
    (constant names and anonymous values) for data values."""
    domain: tuple[int, ...]
    pool: tuple[str, ...]               # the data universe
    inds: dict = field(default_factory=dict)
    concepts: dict = field(default_factory=dict)
    aroles: dict = field(default_factory=dict)
    croles: dict = field(default_factory=dict)
    datatypes: dict = field(default_factory=dict)
    facets: dict = field(default_factory=dict)      # (datatype, facet) keys
    datanames: dict = field(default_factory=dict)

    def snapshot(self) -> "Interpretation":
        return Interpretation(self.domain, self.pool, dict(self.inds),
                              dict(self.concepts), dict(self.aroles),
                              dict(self.croles), dict(self.datatypes),
                              dict(self.facets), dict(self.datanames))


def data_pool(kb: dl.KnowledgeBase) -> tuple[str, ...]:
    """Constants, one anonymous value per datatype, one extra."""
    pool = list(kb.constants())
    pool.extend("~" + d.name for d in kb.datatypes)
    pool.append("~")
    return tuple(pool)


# ---------------------------------------------------------------------------
# term extensions

def concept_ext(i: Interpretation, c) -> frozenset:
    if isinstance(c, dl.ConceptName):
        return i.concepts[c.name]
    if isinstance(c, dl.Top):
        return frozenset(i.domain)
    if isinstance(c, dl.Bottom):
        return frozenset()
    if isinstance(c, dl.ConceptNot):
        return frozenset(i.domain) - concept_ext(i, c.arg)
    if isinstance(c, dl.ConceptOr):
        return concept_ext(i, c.left) | concept_ext(i, c.right)
    if isinstance(c, dl.ConceptAnd):
        return concept_ext(i, c.left) & concept_ext(i, c.right)
    if isinstance(c, dl.NominalSet):
        return frozenset(i.inds[m] for m in c.members)
    if isinstance(c, dl.SelfConcept):
        r = role_ext(i, c.role)
        return frozenset(x for x in i.domain if (x, x) in r)
    if isinstance(c, dl.ValueConcept):
        r = role_ext(i, c.role)
        y = i.inds[c.individual]
        return frozenset(x for x in i.domain if (x, y) in r)
    if isinstance(c, dl.DataValueConcept):
        p = crole_ext(i, c.crole)
        return frozenset(x for x in i.domain if (x, c.constant) in p)
    raise TypeError(f"not a concept term: {c!r}")


def role_ext(i: Interpretation, r) -> frozenset:
    if isinstance(r, dl.RoleName):
        return i.aroles[r.name]
    if isinstance(r, dl.UniversalRole):
        return frozenset(itertools.product(i.domain, i.domain))
    if isinstance(r, dl.RoleInv):
        return frozenset((y, x) for x, y in role_ext(i, r.arg))
    if isinstance(r, dl.RoleNot):
        full = frozenset(itertools.product(i.domain, i.domain))
        return full - role_ext(i, r.arg)
    if isinstance(r, dl.RoleOr):
        return role_ext(i, r.left) | role_ext(i, r.right)
    if isinstance(r, dl.RoleAnd):
        return role_ext(i, r.left) & role_ext(i, r.right)
    if isinstance(r, dl.RoleDomRestr):
        dom = concept_ext(i, r.concept)
        return frozenset(p for p in role_ext(i, r.role) if p[0] in dom)
    if isinstance(r, dl.RoleRanRestr):
        ran = concept_ext(i, r.concept)
        return frozenset(p for p in role_ext(i, r.role) if p[1] in ran)
    if isinstance(r, dl.RoleRestr):
        dom, ran = concept_ext(i, r.dom), concept_ext(i, r.ran)
        return frozenset(p for p in role_ext(i, r.role)
                         if p[0] in dom and p[1] in ran)
    if isinstance(r, dl.RoleId):
        return frozenset((x, x) for x in concept_ext(i, r.concept))
    if isinstance(r, dl.RoleProd):
        return frozenset(itertools.product(concept_ext(i, r.dom),
                                           concept_ext(i, r.ran)))
    raise TypeError(f"not a role term: {r!r}")


def crole_ext(i: Interpretation, p) -> frozenset:
    if isinstance(p, dl.CRoleName):
        return i.croles[p.name]
    if isinstance(p, dl.CRoleNot):
        full = frozenset(itertools.product(i.domain, i.pool))
        return full - crole_ext(i, p.arg)
    if isinstance(p, dl.CRoleOr):
        return crole_ext(i, p.left) | crole_ext(i, p.right)
    if isinstance(p, dl.CRoleAnd):
        return crole_ext(i, p.left) & crole_ext(i, p.right)
    if isinstance(p, dl.CRoleDomRestr):
        dom = concept_ext(i, p.concept)
        return frozenset(q for q in crole_ext(i, p.crole) if q[0] in dom)
    if isinstance(p, dl.CRoleRanRestr):
        ran = data_ext(i, p.data)
        return frozenset(q for q in crole_ext(i, p.crole) if q[1] in ran)
    if isinstance(p, dl.CRoleRestr):
        dom, ran = concept_ext(i, p.dom), data_ext(i, p.ran)
        return frozenset(q for q in crole_ext(i, p.crole)
                         if q[0] in dom and q[1] in ran)
    raise TypeError(f"not a concrete-role term: {p!r}")


def data_ext(i: Interpretation, t) -> frozenset:
    if isinstance(t, dl.DatatypeName):
        return i.datatypes[t.name]
    if isinstance(t, dl.DataName):
        return i.datanames[t.name]
    if isinstance(t, dl.DataTop):
        return i.datatypes[t.datatype]
    if isinstance(t, dl.DataBottom):
        return frozenset()
    if isinstance(t, dl.FacetExpr):
        scope = i.datatypes[t.datatype]
        out = set()
        for v in scope:
            if all(any(_facet_lit_holds(i, t.datatype, lit, v)
                       for lit in clause)
                   for clause in t.clauses):
                out.add(v)
        return frozenset(out)
    if isinstance(t, dl.Enumeration):
        return frozenset(t.members)
    if isinstance(t, dl.DataNot):
        return frozenset(i.pool) - data_ext(i, t.arg)
    if isinstance(t, dl.DataOr):
        return data_ext(i, t.left) | data_ext(i, t.right)
    if isinstance(t, dl.DataAnd):
        return data_ext(i, t.left) & data_ext(i, t.right)
    raise TypeError(f"not a data term: {t!r}")


def _facet_lit_holds(i: Interpretation, datatype: str, lit: dl.FacetLit,
                     v: str) -> bool:
    if lit.kind == "facet":
        val = v in i.facets[(datatype, lit.name)]
    elif lit.kind == "top":
        val = True                 # already scoped to the datatype
    else:
        val = False
    return val if lit.positive else not val


# ---------------------------------------------------------------------------
# statement satisfaction

def _any_role_ext(i: Interpretation, role):
    if isinstance(role, dl.ROLE_TERM_TYPES):
        return role_ext(i, role), "a"
    return crole_ext(i, role), "c"


def _filler_ext(i: Interpretation, filler, sort: str):
    if sort == "a":
        return concept_ext(i, filler)
    return data_ext(i, filler)


def _successors(rel, x):
    return frozenset(y for a, y in rel if a == x)


def _compose(r1, r2):
    by_first: dict = {}
    for a, b in r2:
        by_first.setdefault(a, []).append(b)
    return frozenset((a, c) for a, b in r1 for c in by_first.get(b, ()))


def statement_holds(i: Interpretation, stmt) -> bool:
    if isinstance(stmt, dl.ConceptEquiv):
        return concept_ext(i, stmt.lhs) == concept_ext(i, stmt.rhs)
    if isinstance(stmt, dl.ConceptSub):
        return concept_ext(i, stmt.lhs) <= concept_ext(i, stmt.rhs)
    if isinstance(stmt, dl.SubAllValues):
        rel, sort = _any_role_ext(i, stmt.role)
        filler = _filler_ext(i, stmt.filler, sort)
        return all(_successors(rel, x) <= filler
                   for x in concept_ext(i, stmt.lhs))
    if isinstance(stmt, dl.ExistsSub):
        rel, sort = _any_role_ext(i, stmt.role)
        filler = _filler_ext(i, stmt.filler, sort)
        hit = frozenset(x for x, y in rel if y in filler)
        return hit <= concept_ext(i, stmt.rhs)
    if isinstance(stmt, dl.MinCardSub):
        rel, sort = _any_role_ext(i, stmt.role)
        filler = _filler_ext(i, stmt.filler, sort)
        hit = frozenset(x for x in i.domain
                        if len(_successors(rel, x) & filler) >= stmt.n)
        return hit <= concept_ext(i, stmt.rhs)
    if isinstance(stmt, dl.SubMaxCard):
        rel, sort = _any_role_ext(i, stmt.role)
        filler = _filler_ext(i, stmt.filler, sort)
        return all(len(_successors(rel, x) & filler) <= stmt.n
                   for x in concept_ext(i, stmt.lhs))
    if isinstance(stmt, dl.RoleEquiv):
        return role_ext(i, stmt.lhs) == role_ext(i, stmt.rhs)
    if isinstance(stmt, dl.RoleSub):
        return role_ext(i, stmt.lhs) <= role_ext(i, stmt.rhs)
    if isinstance(stmt, dl.RoleChainSub):
        acc = role_ext(i, stmt.chain[0])
        for link in stmt.chain[1:]:
            acc = _compose(acc, role_ext(i, link))
        return acc <= role_ext(i, stmt.rhs)
    if isinstance(stmt, dl.RoleProp):
        r = role_ext(i, stmt.role)
        if stmt.kind == "ref":
            return all((x, x) in r for x in i.domain)
        if stmt.kind == "irref":
            return all((x, x) not in r for x in i.domain)
        if stmt.kind == "sym":
            return r == frozenset((y, x) for x, y in r)
        if stmt.kind == "asym":
            return not (r & frozenset((y, x) for x, y in r))
        if stmt.kind == "tra":
            return _compose(r, r) <= r
        if stmt.kind == "fun":
            return all(len(_successors(r, x)) <= 1 for x in i.domain)
        raise ValueError(f"unknown role property {stmt.kind!r}")
    if isinstance(stmt, dl.RoleDis):
        return not (role_ext(i, stmt.r1) & role_ext(i, stmt.r2))
    if isinstance(stmt, dl.CRoleEquiv):
        return crole_ext(i, stmt.lhs) == crole_ext(i, stmt.rhs)
    if isinstance(stmt, dl.CRoleSub):
        return crole_ext(i, stmt.lhs) <= crole_ext(i, stmt.rhs)
    if isinstance(stmt, dl.CRoleProp):
        if stmt.kind == "fun":
            p = crole_ext(i, stmt.crole)
            return all(len(_successors(p, x)) <= 1 for x in i.domain)
        raise ValueError(f"unknown concrete-role property {stmt.kind!r}")
    if isinstance(stmt, dl.CRoleDis):
        return not (crole_ext(i, stmt.p1) & crole_ext(i, stmt.p2))
    if isinstance(stmt, dl.DataEquiv):
        return data_ext(i, stmt.lhs) == data_ext(i, stmt.rhs)
    if isinstance(stmt, dl.DataSub):
        return data_ext(i, stmt.lhs) <= data_ext(i, stmt.rhs)
    if isinstance(stmt, dl.ConceptAssertion):
        return i.inds[stmt.individual] in concept_ext(i, stmt.concept)
    if isinstance(stmt, dl.RoleAssertion):
        val = (i.inds[stmt.a], i.inds[stmt.b]) in role_ext(i, stmt.role)
        return val if stmt.positive else not val
    if isinstance(stmt, dl.IndEq):
        val = i.inds[stmt.a] == i.inds[stmt.b]
        return val if stmt.positive else not val
    if isinstance(stmt, dl.ConstAssertion):
        return stmt.constant in data_ext(i, stmt.data)
    if isinstance(stmt, dl.CRoleAssertion):
        val = (i.inds[stmt.individual], stmt.constant) in crole_ext(i, stmt.crole)
        return val if stmt.positive else not val
    raise TypeError(f"not a statement: {stmt!r}")


def kb_holds(i: Interpretation, kb: dl.KnowledgeBase) -> bool:
    return all(statement_holds(i, s) for s in kb.statements)


# ---------------------------------------------------------------------------
# staged enumeration

def _term_symbols(t, out: set) -> None:
    if isinstance(t, dl.ConceptName):
        out.add(("concept", t.name))
    elif isinstance(t, dl.RoleName):
        out.add(("arole", t.name))
    elif isinstance(t, dl.CRoleName):
        out.add(("crole", t.name))
    elif isinstance(t, dl.DatatypeName):
        out.add(("datatype", t.name))
    elif isinstance(t, dl.DataName):
        out.add(("dataname", t.name))
    elif isinstance(t, (dl.DataTop, dl.DataBottom)):
        out.add(("datatype", t.datatype))
    elif isinstance(t, dl.FacetExpr):
        out.add(("datatype", t.datatype))
        for clause in t.clauses:
            for lit in clause:
                if lit.kind == "facet":
                    out.add(("facet", t.datatype, lit.name))
    elif hasattr(t, "__dataclass_fields__"):
        for v in vars(t).values():
            if isinstance(v, tuple):
                for w in v:
                    _term_symbols(w, out)
            else:
                _term_symbols(v, out)


def _statement_symbols(stmt) -> frozenset:
    out: set = set()
    _term_symbols(stmt, out)
    return frozenset(out)


def _subsets(base: tuple):
    for r in range(len(base) + 1):
        for combo in itertools.combinations(base, r):
            yield frozenset(combo)


def enumerate_interpretations(kb: dl.KnowledgeBase,
                              limit: int = ORACLE_NODE_LIMIT):
    """Yield every interpretation of the KB within the exact bounds,
    pruning a partial assignment as soon as some statement with all its
    symbols assigned fails.  Raises BudgetError past `limit` nodes."""
    pool = data_pool(kb)
    const_dt = {c: d.name for d in kb.datatypes for c in d.constants}

    order: list[tuple] = [("concept", n) for n in kb.concepts]
    for d in kb.datatypes:
        order.append(("datatype", d.name))
        order.extend(("facet", d.name, f) for f in d.facets)
    order.extend(("dataname", n) for n in kb.datanames)
    order.extend(("arole", n) for n in kb.aroles)
    order.extend(("crole", n) for n in kb.croles)
    position = {sym: k for k, sym in enumerate(order)}

    # attach each statement to the last symbol it needs
    ready: list[list] = [[] for _ in order]
    ready_pre: list = []
    for stmt in kb.statements:
        syms = _statement_symbols(stmt)
        if syms:
            ready[max(position[s] for s in syms)].append(stmt)
        else:
            ready_pre.append(stmt)

    steps = [0]

    def tick() -> None:
        steps[0] += 1
        if steps[0] > limit:
            raise BudgetError(
                f"interpretation search passed {limit} assignments")

    def options(i: Interpretation, sym: tuple):
        kind = sym[0]
        if kind == "concept":
            yield from _subsets(i.domain)
        elif kind == "arole":
            yield from _subsets(tuple(itertools.product(i.domain, i.domain)))
        elif kind == "crole":
            yield from _subsets(tuple(itertools.product(i.domain, pool)))
        elif kind == "datatype":
            # nonempty, holds its own constants, disjoint from every
            # other datatype: other constants and earlier extents are off
            # limits
            fixed = frozenset(c for c, d in const_dt.items() if d == sym[1])
            taken = frozenset().union(*i.datatypes.values()) \
                if i.datatypes else frozenset()
            rest = tuple(v for v in pool
                         if v not in fixed and v not in taken
                         and const_dt.get(v, sym[1]) == sym[1])
            for extra in _subsets(rest):
                if fixed or extra:     # datatypes are nonempty
                    yield fixed | extra
        elif kind == "dataname":
            yield from _subsets(pool)
        else:                          # facet, inside its datatype
            yield from _subsets(tuple(sorted(i.datatypes[sym[1]])))

    def store(i: Interpretation, sym: tuple, value: frozenset) -> None:
        kind = sym[0]
        if kind == "concept":
            i.concepts[sym[1]] = value
        elif kind == "arole":
            i.aroles[sym[1]] = value
        elif kind == "crole":
            i.croles[sym[1]] = value
        elif kind == "datatype":
            i.datatypes[sym[1]] = value
        elif kind == "dataname":
            i.datanames[sym[1]] = value
        else:
            i.facets[(sym[1], sym[2])] = value

    def assign(i: Interpretation, k: int):
        if k == len(order):
            yield i.snapshot()
            return
        sym = order[k]
        for value in options(i, sym):
            tick()
            store(i, sym, value)
            if all(statement_holds(i, s) for s in ready[k]):
                yield from assign(i, k + 1)

    for n in range(1, len(kb.individuals) + 2):
        domain = tuple(range(n))
        for iota in itertools.product(domain, repeat=len(kb.individuals)):
            tick()
            i = Interpretation(domain, pool)
            i.inds = dict(zip(kb.individuals, iota))
            if all(statement_holds(i, s) for s in ready_pre):
                yield from assign(i, 0)


def dl_consistent(kb: dl.KnowledgeBase, limit: int = ORACLE_NODE_LIMIT) -> bool:
    """Exhaustive-search consistency verdict."""
    return next(enumerate_interpretations(kb, limit), None) is not None


# ---------------------------------------------------------------------------
# certain answers by model enumeration

def _qterm_value(i: Interpretation, t: dl.QTerm):
    if t.kind == "ind":
        return i.inds[t.name]
    if t.kind == "const":
        return t.name
    raise ValueError(f"unsubstituted query variable {t.name!r}")


def query_lit_holds(kb: dl.KnowledgeBase, i: Interpretation, lit) -> bool:
    if isinstance(lit, dl.QConcept):
        val = _qterm_value(i, lit.arg) in i.concepts[lit.pred]
    elif isinstance(lit, dl.QData):
        v = _qterm_value(i, lit.arg)
        if lit.pred in i.datatypes:
            val = v in i.datatypes[lit.pred]
        elif lit.pred in i.datanames:
            val = v in i.datanames[lit.pred]
        else:
            dt = next(d.name for d in kb.datatypes if lit.pred in d.facets)
            val = v in i.facets[(dt, lit.pred)]
    elif isinstance(lit, dl.QRole):
        pair = (_qterm_value(i, lit.a), _qterm_value(i, lit.b))
        if lit.pred == "U":
            val = True
        else:
            val = pair in i.aroles[lit.pred]
    elif isinstance(lit, dl.QCRole):
        pair = (_qterm_value(i, lit.a), _qterm_value(i, lit.b))
        val = pair in i.croles[lit.pred]
    else:
        val = _qterm_value(i, lit.a) == _qterm_value(i, lit.b)
    return val if lit.positive else not val


def query_holds(kb: dl.KnowledgeBase, i: Interpretation,
                q: dl.Query) -> bool:
    return all(query_lit_holds(kb, i, lit) for lit in q.literals)


def query_candidates(kb: dl.KnowledgeBase, q: dl.Query):
    """All substitution tuples, aligned with query_vars order."""
    variables = dl.query_vars(q)
    pools = []
    for v in variables:
        if v.sort == "a":
            pools.append(tuple(dl.QTerm("ind", n) for n in kb.individuals))
        else:
            pools.append(tuple(dl.QTerm("const", n, "c")
                               for n in kb.constants()))
    return variables, tuple(itertools.product(*pools))


def dl_answers(kb: dl.KnowledgeBase, q: dl.Query,
               limit: int = ORACLE_NODE_LIMIT) -> frozenset:
    """Substitutions that hold in some interpretation of the KB.

    Tuples are aligned with query_vars order.  An inconsistent KB has
    an empty answer set.
    """
    variables, candidates = query_candidates(kb, q)
    found: set[tuple] = set()
    names = tuple(v.name for v in variables)
    for i in enumerate_interpretations(kb, limit):
        for cand in candidates:
            if cand in found:
                continue
            subst = dict(zip(names, cand))
            if query_holds(kb, i, dl.apply_substitution(q, subst)):
                found.add(cand)
        if len(found) == len(candidates):
            break
    return frozenset(found)


# ---------------------------------------------------------------------------
# ground clause sets, by direct enumeration

def brute_sat(problem: GroundProblem,
              bit_budget: int = BRUTE_BIT_BUDGET) -> bool:
    """Satisfiability of the ground clauses, respecting equality.

    Enumerates which equality atoms hold (keeping only transitively
    closed choices), folds the other atoms by the induced element
    classes, then walks assignments of the folded atoms in Gray-code
    order so each step flips one atom.
    """
    clauses = problem.clauses
    if () in clauses:
        return False
    eq_ids = [k for k, a in enumerate(problem.atoms)
              if isinstance(a, EqAtom)]
    other = [k for k, a in enumerate(problem.atoms)
             if not isinstance(a, EqAtom)]
    if len(eq_ids) + len(other) > bit_budget:
        raise BudgetError(
            f"{len(eq_ids) + len(other)} atoms exceed the "
            f"{bit_budget}-bit enumeration budget")

    n_elems = len(problem.elems)
    for mask in range(1 << len(eq_ids)):
        parent = list(range(n_elems))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for bit, k in enumerate(eq_ids):
            if mask >> bit & 1:
                atom = problem.atoms[k]
                ra = find(problem.elem_ids[atom.a])
                rb = find(problem.elem_ids[atom.b])
                parent[ra] = rb
        # discard choices that are not transitively closed
        closed = True
        truth = {}
        for bit, k in enumerate(eq_ids):
            atom = problem.atoms[k]
            same = (find(problem.elem_ids[atom.a])
                    == find(problem.elem_ids[atom.b]))
            truth[k] = bool(mask >> bit & 1)
            if truth[k] != same:
                closed = False
                break
        if not closed:
            continue

        # fold the remaining atoms along the classes
        fold: dict[int, int] = {}
        qid_of: dict = {}
        for k in other:
            atom = problem.atoms[k]
            if hasattr(atom, "y"):
                key = (find(problem.elem_ids[atom.x]),
                       find(problem.elem_ids[atom.y]), atom.r)
            else:
                key = (find(problem.elem_ids[atom.x]), atom.s)
            fold[k] = qid_of.setdefault(key, len(qid_of))
        nq = len(qid_of)

        # translate clauses; None marks one already true
        folded: list[tuple[tuple[int, bool], ...]] = []
        feasible = True
        for cl in clauses:
            lits: dict[int, bool] = {}
            keep = True
            for code in cl:
                k, pos = abs(code) - 1, code > 0
                if k in truth:
                    if truth[k] == pos:
                        keep = False
                        break
                    continue
                q = fold[k]
                if q in lits and lits[q] != pos:
                    keep = False
                    break
                lits[q] = pos
            if not keep:
                continue
            if not lits:
                feasible = False
                break
            folded.append(tuple(lits.items()))
        if not feasible:
            continue
        if _gray_walk(nq, folded):
            return True
    return False


def _gray_walk(nq: int, folded) -> bool:
    """All-false start, then Gray-code flips; True when some assignment
    satisfies every folded clause."""
    counts = []
    occ: list[list[tuple[int, bool]]] = [[] for _ in range(nq)]
    unsat = 0
    for ci, cl in enumerate(folded):
        c = sum(1 for _, pos in cl if not pos)
        counts.append(c)
        if c == 0:
            unsat += 1
        for q, pos in cl:
            occ[q].append((ci, pos))
    if unsat == 0:
        return True
    assignment = 0
    for step in range(1, 1 << nq):
        bit = (step & -step).bit_length() - 1
        assignment ^= 1 << bit
        now = bool(assignment >> bit & 1)
        for ci, pos in occ[bit]:
            if pos == now:
                counts[ci] += 1
                if counts[ci] == 1:
                    unsat -= 1
            else:
                counts[ci] -= 1
                if counts[ci] == 0:
                    unsat += 1
        if unsat == 0:
            return True
    return False
