"""Grounding: from a quantified formula to propositional-style clauses.

Distribution first splits every universal into single-clause universals
(quantifiers pruned to the variables the clause uses), then expansion
instantiates each one over every tuple of free element variables.  The
free element variables are exactly the named individuals, constants, and
witnesses occurring in the ground part, so the expansion is finite and
its size is sum(k**q_i) over the per-universal arities.

Ground literals are interned to integers: atom ids count from 0, a
literal is +(id+1) or -(id+1).  Equalities are stored with their two
sides in label order, so the same unordered pair always lands on the
same atom id.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from .errors import BudgetError
from .formulas import (
    Atom, Clause, ElemVar, EqAtom, KbFormula, Lit, Universal,
    alpha_rename, atom_elem_vars, clause_elem_vars, subst_clause,
)

EXPANSION_BUDGET = 10_000_000


def canonical_atom(atom: Atom) -> Atom:
    if isinstance(atom, EqAtom) and atom.b.label < atom.a.label:
        return EqAtom(atom.b, atom.a)
    return atom


def distribute(formula: KbFormula) -> tuple[Universal, ...]:
    """Single-clause universals, quantifiers pruned to used variables."""
    out: list[Universal] = []
    for u in formula.universals:
        for clause in u.clauses:
            used = clause_elem_vars(clause)
            bound = tuple(v for v in u.bound if v in used)
            out.append(alpha_rename(Universal(bound, (clause,))))
    return tuple(out)


def free_elements(formula: KbFormula) -> tuple[ElemVar, ...]:
    """Free element variables in first-occurrence order."""
    seen: dict[ElemVar, None] = {}
    for lit in formula.ground:
        for v in atom_elem_vars(lit.atom):
            seen.setdefault(v, None)
    for v in formula.witness_vars:
        seen.setdefault(v, None)
    for u in formula.universals:
        bound = set(u.bound)
        for clause in u.clauses:
            for v in clause_elem_vars(clause):
                if v not in bound:
                    seen.setdefault(v, None)
    return tuple(seen)


@dataclass
class GroundingStats:
    k: int                       # free element variables
    m: int                       # single-clause universals after distribution
    r: int                       # largest quantifier prefix among them
    l: int                       # widest ground clause
    clauses: int                 # distinct ground clauses kept
    per_universal: tuple[tuple[int, int], ...] = ()   # (arity, instances)

    @property
    def total_instances(self) -> int:
        return sum(n for _, n in self.per_universal)

    def as_dict(self) -> dict:
        return {"v": 1, "k": self.k, "m": self.m, "r": self.r, "l": self.l,
                "clauses": self.clauses}


class GroundProblem:
    """Interned ground clause set plus the element universe."""

    def __init__(self, elems: tuple[ElemVar, ...]):
        self.elems = elems
        self.elem_ids = {e: i for i, e in enumerate(elems)}
        self.atoms: list[Atom] = []
        self._ids: dict[Atom, int] = {}
        self._lock = threading.Lock()
        self.clauses: list[tuple[int, ...]] = []
        self._clause_keys: set[frozenset[int]] = set()
        self.stats: GroundingStats | None = None
        # literal-rewriting caches shared by all branches; partition
        # states are interned so cache keys stay small
        self.canon_cache: dict[tuple[int, int], int | bool] = {}
        self._states: dict[tuple[int, ...], int] = {
            tuple(range(len(elems))): 0}

    def state_id(self, partition: tuple[int, ...]) -> int:
        i = self._states.get(partition)
        if i is None:
            with self._lock:
                i = self._states.setdefault(partition, len(self._states))
        return i

    def atom_id(self, atom: Atom) -> int:
        atom = canonical_atom(atom)
        i = self._ids.get(atom)
        if i is None:
            # saturation workers intern rewritten atoms concurrently
            with self._lock:
                i = self._ids.get(atom)
                if i is None:
                    i = len(self.atoms)
                    self.atoms.append(atom)
                    self._ids[atom] = i
        return i

    def encode_lit(self, lit: Lit) -> int:
        i = self.atom_id(lit.atom) + 1
        return i if lit.positive else -i

    def decode_lit(self, code: int) -> Lit:
        return Lit(self.atoms[abs(code) - 1], code > 0)

    def add_clause(self, lits: tuple[int, ...]) -> bool:
        """Keep a clause unless it is a duplicate; empty clauses count."""
        key = frozenset(lits)
        if key in self._clause_keys:
            return False
        self._clause_keys.add(key)
        self.clauses.append(lits)
        return True

    def with_units(self, lits) -> "GroundProblem":
        """A copy with extra unit clauses, sharing the atom table."""
        ext = GroundProblem(self.elems)
        ext.atoms = self.atoms
        ext._ids = self._ids
        ext._lock = self._lock
        ext.clauses = list(self.clauses)
        ext._clause_keys = set(self._clause_keys)
        ext.stats = self.stats
        ext.canon_cache = self.canon_cache
        ext._states = self._states
        for lit in lits:
            code = _encode_clause(ext, (lit,))
            if code is not None:
                ext.add_clause(code)
        return ext


def _encode_clause(problem: GroundProblem, clause: Clause) -> tuple[int, ...] | None:
    """Integer clause, or None when it is trivially true."""
    out: list[int] = []
    seen: set[int] = set()
    for lit in clause:
        atom = lit.atom
        if isinstance(atom, EqAtom) and atom.a == atom.b:
            if lit.positive:
                return None          # x = x: the clause already holds
            continue                 # x != x contributes nothing
        code = problem.encode_lit(lit)
        if -code in seen:
            return None              # p or not p
        if code in seen:
            continue
        out.append(code)
        seen.add(code)
    return tuple(out)


def ground_kb(formula: KbFormula,
              budget: int = EXPANSION_BUDGET) -> GroundProblem:
    """Expand every universal over every element tuple."""
    elems = free_elements(formula)
    singles = distribute(formula)
    k = len(elems)

    total = 0
    for u in singles:
        total += k ** len(u.bound)
        if total > budget:
            raise BudgetError(
                f"grounding needs {total}+ clause instances, over the "
                f"budget of {budget}")

    problem = GroundProblem(elems)
    for lit in formula.ground:
        code = _encode_clause(problem, (lit,))
        if code is not None:
            problem.add_clause(code)

    per_universal: list[tuple[int, int]] = []
    for u in singles:
        q = len(u.bound)
        count = 0
        clause = u.clauses[0]
        for tup in itertools.product(elems, repeat=q):
            count += 1
            m = dict(zip(u.bound, tup))
            code = _encode_clause(problem, subst_clause(clause, m))
            if code is not None:
                problem.add_clause(code)
        per_universal.append((q, count))

    widths = [len(c) for c in problem.clauses]
    problem.stats = GroundingStats(
        k=k,
        m=len(singles),
        r=max((len(u.bound) for u in singles), default=0),
        l=max(widths, default=0),
        clauses=len(problem.clauses),
        per_universal=tuple(per_universal),
    )
    return problem
