"""Formula model for the quantified set-theoretic target language.

Formulas use three variable kinds: element variables (level 0), set
variables (level 1), and binary-relation variables (level 3 in the source
numbering).  Matrices are CNF over three atom shapes: element equality,
set membership, and pair membership.  Universals quantify element
variables only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class ElemVar:
    key: tuple
    label: str

    def __repr__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SetVar:
    key: tuple
    label: str

    def __repr__(self) -> str:
        return self.label


@dataclass(frozen=True)
class RelVar:
    key: tuple
    label: str

    def __repr__(self) -> str:
        return self.label


def bound_var(i: int) -> ElemVar:
    """The i-th quantified element variable (1-based) of a universal."""
    return ElemVar(("bound", i), f"z{i}")


@dataclass(frozen=True)
class MemSet:
    x: ElemVar
    s: SetVar

@dataclass(frozen=True)
class MemRel:
    x: ElemVar
    y: ElemVar
    r: RelVar

@dataclass(frozen=True)
class EqAtom:
    a: ElemVar
    b: ElemVar

Atom = Union[MemSet, MemRel, EqAtom]


@dataclass(frozen=True)
class Lit:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Lit":
        return Lit(self.atom, not self.positive)


Clause = tuple[Lit, ...]


@dataclass(frozen=True)
class Universal:
    """Purely universal formula: quantified element vars over a CNF matrix."""
    bound: tuple[ElemVar, ...]
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class KbFormula:
    """Conjunction of ground unit literals and universals, plus the
    existential witnesses already skolemized into ground units."""
    ground: tuple[Lit, ...]
    universals: tuple[Universal, ...]
    witness_vars: tuple[ElemVar, ...] = ()


# ---------------------------------------------------------------------------
# traversal helpers

def atom_elem_vars(atom: Atom) -> tuple[ElemVar, ...]:
    if isinstance(atom, MemSet):
        return (atom.x,)
    if isinstance(atom, MemRel):
        return (atom.x, atom.y)
    return (atom.a, atom.b)


def clause_elem_vars(clause: Clause) -> set[ElemVar]:
    out: set[ElemVar] = set()
    for lit in clause:
        out.update(atom_elem_vars(lit.atom))
    return out


def subst_atom(atom: Atom, m: dict[ElemVar, ElemVar]) -> Atom:
    if isinstance(atom, MemSet):
        return MemSet(m.get(atom.x, atom.x), atom.s)
    if isinstance(atom, MemRel):
        return MemRel(m.get(atom.x, atom.x), m.get(atom.y, atom.y), atom.r)
    return EqAtom(m.get(atom.a, atom.a), m.get(atom.b, atom.b))


def subst_clause(clause: Clause, m: dict[ElemVar, ElemVar]) -> Clause:
    return tuple(Lit(subst_atom(l.atom, m), l.positive) for l in clause)


def formula_free_elem_vars(f: KbFormula) -> set[ElemVar]:
    """Element variables occurring free anywhere in the formula."""
    out: set[ElemVar] = set()
    for lit in f.ground:
        out.update(atom_elem_vars(lit.atom))
    for u in f.universals:
        bound = set(u.bound)
        for clause in u.clauses:
            out.update(v for v in clause_elem_vars(clause) if v not in bound)
    return out


# ---------------------------------------------------------------------------
# s-expression rendering

def atom_sexpr(atom: Atom) -> str:
    if isinstance(atom, MemSet):
        return f"(in {atom.x.label} {atom.s.label})"
    if isinstance(atom, MemRel):
        return f"(rel {atom.x.label} {atom.y.label} {atom.r.label})"
    return f"(eq {atom.a.label} {atom.b.label})"


def lit_sexpr(lit: Lit) -> str:
    s = atom_sexpr(lit.atom)
    return s if lit.positive else f"(not {s})"


def clause_sexpr(clause: Clause) -> str:
    if len(clause) == 1:
        return lit_sexpr(clause[0])
    return "(or " + " ".join(lit_sexpr(l) for l in clause) + ")"


def universal_sexpr(u: Universal) -> str:
    body = ("(and " + " ".join(clause_sexpr(c) for c in u.clauses) + ")"
            if len(u.clauses) != 1 else clause_sexpr(u.clauses[0]))
    names = " ".join(v.label for v in u.bound)
    return f"(forall ({names}) {body})"


def formula_sexpr(f: KbFormula) -> str:
    lines = ["(kb"]
    for lit in f.ground:
        lines.append("  " + lit_sexpr(lit))
    for u in f.universals:
        lines.append("  " + universal_sexpr(u))
    lines.append(")")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# alpha equivalence

def alpha_rename(u: Universal) -> Universal:
    """Rename bound variables positionally to the canonical z1..zq."""
    m = {v: bound_var(i + 1) for i, v in enumerate(u.bound)}
    return Universal(tuple(m[v] for v in u.bound),
                     tuple(subst_clause(c, m) for c in u.clauses))


def alpha_equivalent(u1: Universal, u2: Universal) -> bool:
    """Structural equality up to bound-variable names (order-sensitive)."""
    if len(u1.bound) != len(u2.bound):
        return False
    return alpha_rename(u1) == alpha_rename(u2)
