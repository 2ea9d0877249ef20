"""Translation of a normalized KB into the quantified set-formula language.

Each normalized statement maps to one purely universal formula (or to
ground unit literals, for assertions), and the signature induces a fixed
family of background constraints tying the set variables to the two-sorted
domain: individuals on one side, data values on the other.

A handful of entries carry an extra domain-guard literal (`in z S[I]` and
friends) on their covering clauses.  Complements and reflexivity are
relative to a sort's domain, not to the whole universe; without the guard
the translation of e.g. a concept complement forces the union of two
concepts to swallow the data side, which is unsatisfiable alongside the
domain partition constraints and breaks the consistency correspondence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import dlmodel as dl
from .dlmodel import KnowledgeBase, Query, Statement
from .errors import CapacityError, TranslationError
from .formulas import (
    Clause, ElemVar, EqAtom, KbFormula, Lit, MemRel, MemSet, RelVar, SetVar,
    Universal, bound_var,
)

FACET_EXPANSION_CAP = 4096

# ---------------------------------------------------------------------------
# variable constructors (bijective by construction: keys are kinded)

IND_DOM = SetVar(("dom", "I"), "S[I]")
DATA_DOM = SetVar(("dom", "D"), "S[D]")
TOP_SET = SetVar(("top",), "S[top]")
BOT_SET = SetVar(("bot",), "S[bot]")
UNIV_REL = RelVar(("univ",), "R[U]")

WIT_IND = ElemVar(("wit", "I"), "x[__wI]")
WIT_DATA = ElemVar(("wit", "D"), "x[__wD]")


def ind_elem(name: str) -> ElemVar:
    return ElemVar(("ind", name), f"x[{name}]")


def const_elem(name: str) -> ElemVar:
    return ElemVar(("const", name), f"x[{name}]")


def query_elem(name: str, sort: str) -> ElemVar:
    return ElemVar(("qvar", name, sort), f"x[?{name}]")


def datatype_witness(d: str) -> ElemVar:
    return ElemVar(("wit", "dt", d), f"x[__w_{d}]")


def concept_set(name: str) -> SetVar:
    return SetVar(("concept", name), f"S[{name}]")


def nominal_set_var(members: tuple[str, ...]) -> SetVar:
    return SetVar(("nom", members), "S[{" + ",".join(members) + "}]")


def datatype_set(d: str) -> SetVar:
    return SetVar(("dt", d), f"S[{d}]")


def data_top_set(d: str) -> SetVar:
    return SetVar(("dtop", d), f"S[top({d})]")


def data_bot_set(d: str) -> SetVar:
    return SetVar(("dbot", d), f"S[bot({d})]")


def facet_set(d: str, f: str) -> SetVar:
    return SetVar(("facet", d, f), f"S[{f}]")


def facet_expr_code(fe: dl.FacetExpr) -> str:
    def lit(l: dl.FacetLit) -> str:
        base = {"facet": l.name, "top": "T", "bot": "F"}[l.kind]
        return base if l.positive else "!" + base

    return "&".join("|".join(lit(l) for l in c) for c in fe.clauses)


def facet_expr_set(fe: dl.FacetExpr) -> SetVar:
    return SetVar(("fexpr", fe), f"S[fx:{fe.datatype}:{facet_expr_code(fe)}]")


def enum_set(members: tuple[str, ...]) -> SetVar:
    return SetVar(("enum", members), "S[{" + ",".join(members) + "}]")


def data_name_set(name: str) -> SetVar:
    return SetVar(("dname", name), f"S[{name}]")


def arole_rel(name: str) -> RelVar:
    return RelVar(("arole", name), f"R[{name}]")


def crole_rel(name: str) -> RelVar:
    return RelVar(("crole", name), f"R[{name}]")


def _is_plain_facet(fe: dl.FacetExpr) -> dl.FacetLit | None:
    """The single positive literal of a one-literal CNF, if that is all."""
    if len(fe.clauses) == 1 and len(fe.clauses[0]) == 1:
        l = fe.clauses[0][0]
        if l.positive:
            return l
    return None


def set_for_concept_atom(c: dl.Concept) -> SetVar:
    if isinstance(c, dl.ConceptName):
        return concept_set(c.name)
    if isinstance(c, dl.Top):
        return TOP_SET
    if isinstance(c, dl.Bottom):
        return BOT_SET
    if isinstance(c, dl.NominalSet):
        return nominal_set_var(c.members)
    raise TranslationError(f"not a concept atom: {c!r}")


def set_for_data_atom(t: dl.Data) -> SetVar:
    if isinstance(t, dl.DatatypeName):
        return datatype_set(t.name)
    if isinstance(t, dl.DataName):
        return data_name_set(t.name)
    if isinstance(t, dl.DataTop):
        return data_top_set(t.datatype)
    if isinstance(t, dl.DataBottom):
        return data_bot_set(t.datatype)
    if isinstance(t, dl.Enumeration):
        return enum_set(t.members)
    if isinstance(t, dl.FacetExpr):
        l = _is_plain_facet(t)
        if l is not None:
            if l.kind == "facet":
                return facet_set(t.datatype, l.name)
            if l.kind == "top":
                return data_top_set(t.datatype)
            return data_bot_set(t.datatype)
        return facet_expr_set(t)
    raise TranslationError(f"not a data atom: {t!r}")


def rel_for_role_atom(r: dl.Role) -> RelVar:
    if isinstance(r, dl.RoleName):
        return arole_rel(r.name)
    if isinstance(r, dl.UniversalRole):
        return UNIV_REL
    raise TranslationError(f"not a role atom: {r!r}")


def rel_for_crole_atom(p: dl.CRole) -> RelVar:
    if isinstance(p, dl.CRoleName):
        return crole_rel(p.name)
    raise TranslationError(f"not a concrete role atom: {p!r}")


def _set_for_filler(filler) -> SetVar:
    if dl.is_concept_atom(filler):
        return set_for_concept_atom(filler)
    return set_for_data_atom(filler)


def _rel_for_any_role(role) -> RelVar:
    if isinstance(role, (dl.RoleName, dl.UniversalRole)):
        return rel_for_role_atom(role)
    return rel_for_crole_atom(role)


# literal shorthands over bound or free element vars

def _in(x: ElemVar, s: SetVar, pos: bool = True) -> Lit:
    return Lit(MemSet(x, s), pos)


def _pair(x: ElemVar, y: ElemVar, r: RelVar, pos: bool = True) -> Lit:
    return Lit(MemRel(x, y, r), pos)


def _eq(a: ElemVar, b: ElemVar, pos: bool = True) -> Lit:
    return Lit(EqAtom(a, b), pos)


# ---------------------------------------------------------------------------
# per-statement translation

def translate_statement(stmt: Statement):
    """One normalized statement to a universal formula or ground units."""
    if not dl.is_normalized(stmt):
        raise TranslationError(f"statement is not in the normalized "
                               f"vocabulary: {stmt!r}")

    z1, z2, z3 = bound_var(1), bound_var(2), bound_var(3)

    if isinstance(stmt, dl.ConceptEquiv):
        lhs = set_for_concept_atom(stmt.lhs)
        rhs = stmt.rhs
        if isinstance(rhs, dl.NominalSet) and len(rhs.members) == 1:
            xa = ind_elem(rhs.members[0])
            return Universal((z1,), (
                (_in(z1, lhs, False), _eq(z1, xa)),
                (_eq(z1, xa, False), _in(z1, lhs)),
            ))
        if dl.is_concept_atom(rhs):
            other = set_for_concept_atom(rhs)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, other)),
                (_in(z1, other, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.ConceptNot):
            other = set_for_concept_atom(rhs.arg)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, other, False)),
                (_in(z1, other), _in(z1, lhs), _in(z1, IND_DOM, False)),
            ))
        if isinstance(rhs, dl.ConceptOr):
            a = set_for_concept_atom(rhs.left)
            b = set_for_concept_atom(rhs.right)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, a), _in(z1, b)),
                (_in(z1, a, False), _in(z1, lhs)),
                (_in(z1, b, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.SelfConcept):
            r = rel_for_role_atom(rhs.role)
            return Universal((z1,), (
                (_in(z1, lhs, False), _pair(z1, z1, r)),
                (_pair(z1, z1, r, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.ValueConcept):
            r = rel_for_role_atom(rhs.role)
            xa = ind_elem(rhs.individual)
            return Universal((z1,), (
                (_in(z1, lhs, False), _pair(z1, xa, r)),
                (_pair(z1, xa, r, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.DataValueConcept):
            p = rel_for_crole_atom(rhs.crole)
            xe = const_elem(rhs.constant)
            return Universal((z1,), (
                (_in(z1, lhs, False), _pair(z1, xe, p)),
                (_pair(z1, xe, p, False), _in(z1, lhs)),
            ))
        raise TranslationError(f"unsupported equivalence {stmt!r}")

    if isinstance(stmt, dl.SubAllValues):
        c = set_for_concept_atom(stmt.lhs)
        r = _rel_for_any_role(stmt.role)
        f = _set_for_filler(stmt.filler)
        return Universal((z1, z2), (
            (_in(z1, c, False), _pair(z1, z2, r, False), _in(z2, f)),
        ))

    if isinstance(stmt, dl.ExistsSub):
        r = _rel_for_any_role(stmt.role)
        f = _set_for_filler(stmt.filler)
        c = set_for_concept_atom(stmt.rhs)
        return Universal((z1, z2), (
            (_pair(z1, z2, r, False), _in(z2, f, False), _in(z1, c)),
        ))

    if isinstance(stmt, dl.MinCardSub):
        # >=n successors force membership: one wide clause per the
        # counting semantics (repeated or non-filler successors escape it)
        n = stmt.n
        r = _rel_for_any_role(stmt.role)
        f = _set_for_filler(stmt.filler)
        c = set_for_concept_atom(stmt.rhs)
        z = bound_var(1)
        zs = [bound_var(i + 2) for i in range(n)]
        lits: list[Lit] = []
        for zi in zs:
            lits.append(_in(zi, f, False))
            lits.append(_pair(z, zi, r, False))
        for i, j in itertools.combinations(range(n), 2):
            lits.append(_eq(zs[i], zs[j]))
        lits.append(_in(z, c))
        return Universal(tuple([z] + zs), (tuple(lits),))

    if isinstance(stmt, dl.SubMaxCard):
        n = stmt.n
        c = set_for_concept_atom(stmt.lhs)
        r = _rel_for_any_role(stmt.role)
        f = _set_for_filler(stmt.filler)
        z = bound_var(1)
        zs = [bound_var(i + 2) for i in range(n + 1)]
        lits = [_in(z, c, False)]
        for zi in zs:
            lits.append(_in(zi, f, False))
            lits.append(_pair(z, zi, r, False))
        for i, j in itertools.combinations(range(n + 1), 2):
            lits.append(_eq(zs[i], zs[j]))
        return Universal(tuple([z] + zs), (tuple(lits),))

    if isinstance(stmt, dl.RoleEquiv):
        lhs = rel_for_role_atom(stmt.lhs)
        rhs = stmt.rhs
        pair_l = _pair(z1, z2, lhs)
        if dl.is_role_atom(rhs):
            other = rel_for_role_atom(rhs)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, other)),
                (_pair(z1, z2, other, False), pair_l),
            ))
        if isinstance(rhs, dl.RoleNot):
            other = rel_for_role_atom(rhs.arg)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, other, False)),
                (_pair(z1, z2, other), pair_l,
                 _in(z1, IND_DOM, False), _in(z2, IND_DOM, False)),
            ))
        if isinstance(rhs, dl.RoleOr):
            a, b = rel_for_role_atom(rhs.left), rel_for_role_atom(rhs.right)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, a), _pair(z1, z2, b)),
                (_pair(z1, z2, a, False), pair_l),
                (_pair(z1, z2, b, False), pair_l),
            ))
        if isinstance(rhs, dl.RoleInv):
            other = rel_for_role_atom(rhs.arg)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z2, z1, other)),
                (_pair(z2, z1, other, False), pair_l),
            ))
        if isinstance(rhs, dl.RoleId):
            c = set_for_concept_atom(rhs.concept)
            return Universal((z1, z2), (
                (pair_l.negate(), _in(z1, c)),
                (pair_l.negate(), _in(z2, c)),
                (pair_l.negate(), _eq(z1, z2)),
                (_in(z1, c, False), _in(z2, c, False), _eq(z1, z2, False),
                 pair_l),
            ))
        if isinstance(rhs, dl.RoleProd):
            a = set_for_concept_atom(rhs.dom)
            b = set_for_concept_atom(rhs.ran)
            return Universal((z1, z2), (
                (pair_l.negate(), _in(z1, a)),
                (pair_l.negate(), _in(z2, b)),
                (_in(z1, a, False), _in(z2, b, False), pair_l),
            ))
        if isinstance(rhs, (dl.RoleDomRestr, dl.RoleRanRestr, dl.RoleRestr)):
            other = rel_for_role_atom(rhs.role)
            clauses = [(pair_l.negate(), _pair(z1, z2, other))]
            guards: list[Lit] = []
            if isinstance(rhs, (dl.RoleDomRestr, dl.RoleRestr)):
                cdom = set_for_concept_atom(
                    rhs.concept if isinstance(rhs, dl.RoleDomRestr) else rhs.dom)
                clauses.append((pair_l.negate(), _in(z1, cdom)))
                guards.append(_in(z1, cdom, False))
            if isinstance(rhs, (dl.RoleRanRestr, dl.RoleRestr)):
                cran = set_for_concept_atom(
                    rhs.concept if isinstance(rhs, dl.RoleRanRestr) else rhs.ran)
                clauses.append((pair_l.negate(), _in(z2, cran)))
                guards.append(_in(z2, cran, False))
            clauses.append((_pair(z1, z2, other, False), *guards, pair_l))
            return Universal((z1, z2), tuple(clauses))
        raise TranslationError(f"unsupported role equivalence {stmt!r}")

    if isinstance(stmt, dl.RoleSub):
        a = rel_for_role_atom(stmt.lhs)
        b = rel_for_role_atom(stmt.rhs)
        return Universal((z1, z2), (
            (_pair(z1, z2, a, False), _pair(z1, z2, b)),
        ))

    if isinstance(stmt, dl.RoleChainSub):
        links = [rel_for_role_atom(r) for r in stmt.chain]
        sup = rel_for_role_atom(stmt.rhs)
        n = len(links)
        z = bound_var(1)
        zs = [bound_var(i + 2) for i in range(n)]
        lits = []
        prev = z
        for rel, zi in zip(links, zs):
            lits.append(_pair(prev, zi, rel, False))
            prev = zi
        lits.append(_pair(z, zs[-1], sup))
        return Universal(tuple([z] + zs), (tuple(lits),))

    if isinstance(stmt, dl.RoleProp):
        r = rel_for_role_atom(stmt.role)
        if stmt.kind == "ref":
            return Universal((z1,), (
                (_in(z1, IND_DOM, False), _pair(z1, z1, r)),
            ))
        if stmt.kind == "irref":
            return Universal((z1,), ((_pair(z1, z1, r, False),),))
        if stmt.kind == "fun":
            return Universal((z1, z2, z3), (
                (_pair(z1, z2, r, False), _pair(z1, z3, r, False),
                 _eq(z2, z3)),
            ))
        raise TranslationError(f"role property {stmt.kind!r} must be "
                               "normalized away")

    if isinstance(stmt, dl.RoleDis):
        a, b = rel_for_role_atom(stmt.r1), rel_for_role_atom(stmt.r2)
        return Universal((z1, z2), (
            (_pair(z1, z2, a, False), _pair(z1, z2, b, False)),
        ))

    if isinstance(stmt, dl.CRoleEquiv):
        lhs = rel_for_crole_atom(stmt.lhs)
        rhs = stmt.rhs
        pair_l = _pair(z1, z2, lhs)
        if dl.is_crole_atom(rhs):
            other = rel_for_crole_atom(rhs)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, other)),
                (_pair(z1, z2, other, False), pair_l),
            ))
        if isinstance(rhs, dl.CRoleNot):
            other = rel_for_crole_atom(rhs.arg)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, other, False)),
                (_pair(z1, z2, other), pair_l,
                 _in(z1, IND_DOM, False), _in(z2, DATA_DOM, False)),
            ))
        if isinstance(rhs, dl.CRoleOr):
            a = rel_for_crole_atom(rhs.left)
            b = rel_for_crole_atom(rhs.right)
            return Universal((z1, z2), (
                (pair_l.negate(), _pair(z1, z2, a), _pair(z1, z2, b)),
                (_pair(z1, z2, a, False), pair_l),
                (_pair(z1, z2, b, False), pair_l),
            ))
        if isinstance(rhs, (dl.CRoleDomRestr, dl.CRoleRanRestr, dl.CRoleRestr)):
            other = rel_for_crole_atom(rhs.crole)
            clauses = [(pair_l.negate(), _pair(z1, z2, other))]
            guards: list[Lit] = []
            if isinstance(rhs, (dl.CRoleDomRestr, dl.CRoleRestr)):
                cdom = set_for_concept_atom(
                    rhs.concept if isinstance(rhs, dl.CRoleDomRestr) else rhs.dom)
                clauses.append((pair_l.negate(), _in(z1, cdom)))
                guards.append(_in(z1, cdom, False))
            if isinstance(rhs, (dl.CRoleRanRestr, dl.CRoleRestr)):
                tran = set_for_data_atom(
                    rhs.data if isinstance(rhs, dl.CRoleRanRestr) else rhs.ran)
                clauses.append((pair_l.negate(), _in(z2, tran)))
                guards.append(_in(z2, tran, False))
            clauses.append((_pair(z1, z2, other, False), *guards, pair_l))
            return Universal((z1, z2), tuple(clauses))
        raise TranslationError(f"unsupported concrete role equivalence {stmt!r}")

    if isinstance(stmt, dl.CRoleSub):
        a = rel_for_crole_atom(stmt.lhs)
        b = rel_for_crole_atom(stmt.rhs)
        return Universal((z1, z2), (
            (_pair(z1, z2, a, False), _pair(z1, z2, b)),
        ))

    if isinstance(stmt, dl.CRoleProp):
        p = rel_for_crole_atom(stmt.crole)
        return Universal((z1, z2, z3), (
            (_pair(z1, z2, p, False), _pair(z1, z3, p, False), _eq(z2, z3)),
        ))

    if isinstance(stmt, dl.CRoleDis):
        a, b = rel_for_crole_atom(stmt.p1), rel_for_crole_atom(stmt.p2)
        return Universal((z1, z2), (
            (_pair(z1, z2, a, False), _pair(z1, z2, b, False)),
        ))

    if isinstance(stmt, dl.DataEquiv):
        lhs = set_for_data_atom(stmt.lhs)
        rhs = stmt.rhs
        if isinstance(rhs, dl.Enumeration) and len(rhs.members) == 1:
            xe = const_elem(rhs.members[0])
            return Universal((z1,), (
                (_in(z1, lhs, False), _eq(z1, xe)),
                (_eq(z1, xe, False), _in(z1, lhs)),
            ))
        if dl.is_data_atom(rhs):
            other = set_for_data_atom(rhs)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, other)),
                (_in(z1, other, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.DataNot):
            other = set_for_data_atom(rhs.arg)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, other, False)),
                (_in(z1, other), _in(z1, lhs), _in(z1, DATA_DOM, False)),
            ))
        if isinstance(rhs, dl.DataOr):
            a = set_for_data_atom(rhs.left)
            b = set_for_data_atom(rhs.right)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, a), _in(z1, b)),
                (_in(z1, a, False), _in(z1, lhs)),
                (_in(z1, b, False), _in(z1, lhs)),
            ))
        if isinstance(rhs, dl.DataAnd):
            a = set_for_data_atom(rhs.left)
            b = set_for_data_atom(rhs.right)
            return Universal((z1,), (
                (_in(z1, lhs, False), _in(z1, a)),
                (_in(z1, lhs, False), _in(z1, b)),
                (_in(z1, a, False), _in(z1, b, False), _in(z1, lhs)),
            ))
        raise TranslationError(f"unsupported data equivalence {stmt!r}")

    if isinstance(stmt, dl.ConceptAssertion):
        return (_in(ind_elem(stmt.individual),
                    set_for_concept_atom(stmt.concept)),)
    if isinstance(stmt, dl.RoleAssertion):
        return (_pair(ind_elem(stmt.a), ind_elem(stmt.b),
                      rel_for_role_atom(stmt.role), stmt.positive),)
    if isinstance(stmt, dl.IndEq):
        return (_eq(ind_elem(stmt.a), ind_elem(stmt.b), stmt.positive),)
    if isinstance(stmt, dl.ConstAssertion):
        return (_in(const_elem(stmt.constant), set_for_data_atom(stmt.data)),)
    if isinstance(stmt, dl.CRoleAssertion):
        return (_pair(ind_elem(stmt.individual), const_elem(stmt.constant),
                      rel_for_crole_atom(stmt.crole), stmt.positive),)

    raise TranslationError(f"unsupported statement {stmt!r}")


# ---------------------------------------------------------------------------
# facet expression expansion into facet-variable literals

def facet_literal_lit(z: ElemVar, fe_dt: str, l: dl.FacetLit,
                      positive: bool | None = None) -> Lit:
    pos = l.positive if positive is None else positive
    if l.kind == "facet":
        return _in(z, facet_set(fe_dt, l.name), pos)
    if l.kind == "top":
        return _in(z, data_top_set(fe_dt), pos)
    return _in(z, data_bot_set(fe_dt), pos)


def facet_expansion(fe: dl.FacetExpr, z: ElemVar) -> tuple[Clause, ...]:
    """CNF over facet variables mirroring the expression's own CNF."""
    return tuple(
        tuple(facet_literal_lit(z, fe.datatype, l) for l in clause)
        for clause in fe.clauses
    )


# ---------------------------------------------------------------------------
# background constraints

@dataclass
class SignatureVars:
    """Everything in the (normalized) KB that induces background formulas."""
    concepts: list[str] = field(default_factory=list)
    aroles: list[str] = field(default_factory=list)
    croles: list[str] = field(default_factory=list)
    individuals: list[str] = field(default_factory=list)
    datatypes: list[dl.DatatypeDecl] = field(default_factory=list)
    enums: list[tuple[str, ...]] = field(default_factory=list)
    nominal_sets: list[tuple[str, ...]] = field(default_factory=list)
    facet_exprs: list[dl.FacetExpr] = field(default_factory=list)


def collect_signature(kb: KnowledgeBase) -> SignatureVars:
    sig = SignatureVars(
        concepts=list(kb.concepts),
        aroles=list(kb.aroles),
        croles=list(kb.croles),
        individuals=list(kb.individuals),
        datatypes=list(kb.datatypes),
    )
    seen_enum: set = set()
    seen_nom: set = set()
    seen_fx: set = set()

    def visit_atom(x):
        # singletons matter too: nested under a negation or a union the
        # set variable appears bare and needs its defining clauses
        if isinstance(x, dl.NominalSet):
            if x.members not in seen_nom:
                seen_nom.add(x.members)
                sig.nominal_sets.append(x.members)
        if isinstance(x, dl.Enumeration):
            if x.members not in seen_enum:
                seen_enum.add(x.members)
                sig.enums.append(x.members)
        if isinstance(x, dl.FacetExpr) and _is_plain_facet(x) is None:
            if x not in seen_fx:
                seen_fx.add(x)
                sig.facet_exprs.append(x)

    for stmt in kb.statements:
        for f in vars(stmt).values():
            visit_atom(f)
            # restriction right-hand sides nest one level of atoms
            if hasattr(f, "__dataclass_fields__"):
                for g in vars(f).values():
                    visit_atom(g)
    return sig


def background(sig: SignatureVars):
    """Domain constraints: ground units, grouped universals, witness vars."""
    z1, z2 = bound_var(1), bound_var(2)
    ground: list[Lit] = []
    witnesses: list[ElemVar] = [WIT_IND, WIT_DATA]
    groups: list[tuple[str, Universal]] = []

    def add(tag: str, u: Universal):
        groups.append((tag, u))

    # two disjoint nonempty element sorts covering the universe
    add("partition", Universal((z1,), (
        (_in(z1, IND_DOM, False), _in(z1, DATA_DOM, False)),
        (_in(z1, DATA_DOM), _in(z1, IND_DOM)),
    )))
    add("partition", Universal((z1,), (
        (_in(z1, IND_DOM), _in(z1, DATA_DOM)),
    )))
    ground.append(_in(WIT_IND, IND_DOM))
    ground.append(_in(WIT_DATA, DATA_DOM))

    # the top concept is the individual sort; the bottom concept is empty
    add("top-bot", Universal((z1,), (
        (_in(z1, IND_DOM, False), _in(z1, TOP_SET)),
        (_in(z1, TOP_SET, False), _in(z1, IND_DOM)),
    )))
    add("top-bot", Universal((z1,), ((_in(z1, BOT_SET, False),),)))

    # concepts live inside the individual sort
    for a in sig.concepts:
        add("concept-dom", Universal((z1,), (
            (_in(z1, concept_set(a), False), _in(z1, IND_DOM)),
        )))

    # datatypes are nonempty, inside the data sort, pairwise disjoint
    for d in sig.datatypes:
        add("datatype-dom", Universal((z1,), (
            (_in(z1, datatype_set(d.name), False), _in(z1, DATA_DOM)),
        )))
        w = datatype_witness(d.name)
        witnesses.append(w)
        ground.append(_in(w, datatype_set(d.name)))
    for di, dj in itertools.combinations(sig.datatypes, 2):
        add("datatype-dom", Universal((z1,), (
            (_in(z1, datatype_set(di.name), False),
             _in(z1, datatype_set(dj.name), False)),
        )))

    # per-datatype top and bottom bounds
    for d in sig.datatypes:
        add("datatype-top-bot", Universal((z1,), (
            (_in(z1, datatype_set(d.name), False), _in(z1, data_top_set(d.name))),
            (_in(z1, data_top_set(d.name), False), _in(z1, datatype_set(d.name))),
        )))
        add("datatype-top-bot", Universal((z1,), (
            (_in(z1, data_bot_set(d.name), False),),
        )))

    # facets are subsets of their datatype
    for d in sig.datatypes:
        for f in d.facets:
            add("facet-dom", Universal((z1,), (
                (_in(z1, facet_set(d.name, f), False),
                 _in(z1, datatype_set(d.name))),
            )))

    # the universal relation is exactly the square of the individual sort
    add("universal-rel", Universal((z1, z2), (
        (_in(z1, IND_DOM, False), _in(z2, IND_DOM, False),
         _pair(z1, z2, UNIV_REL)),
        (_pair(z1, z2, UNIV_REL, False), _in(z1, IND_DOM)),
        (_pair(z1, z2, UNIV_REL, False), _in(z2, IND_DOM)),
    )))

    # role typing
    for r in sig.aroles:
        add("arole-typing", Universal((z1, z2), (
            (_pair(z1, z2, arole_rel(r), False), _in(z1, IND_DOM)),
            (_pair(z1, z2, arole_rel(r), False), _in(z2, IND_DOM)),
        )))
    for t in sig.croles:
        add("crole-typing", Universal((z1, z2), (
            (_pair(z1, z2, crole_rel(t), False), _in(z1, IND_DOM)),
            (_pair(z1, z2, crole_rel(t), False), _in(z2, DATA_DOM)),
        )))

    # named elements belong to their sorts; distinct constants denote
    # distinct values (individuals carry no such assumption)
    for a in sig.individuals:
        ground.append(_in(ind_elem(a), IND_DOM))
    for d in sig.datatypes:
        for e in d.constants:
            ground.append(_in(const_elem(e), datatype_set(d.name)))
        for e1, e2 in itertools.combinations(d.constants, 2):
            ground.append(_eq(const_elem(e1), const_elem(e2), False))

    # finite sets are exactly their members
    for members in sig.enums:
        ev = enum_set(members)
        first = tuple([_in(z1, ev, False)]
                      + [_eq(z1, const_elem(e)) for e in members])
        rest = [(_eq(z1, const_elem(e), False), _in(z1, ev))
                for e in members]
        add("finite-sets", Universal((z1,), tuple([first] + rest)))
    for members in sig.nominal_sets:
        nv = nominal_set_var(members)
        first = tuple([_in(z1, nv, False)]
                      + [_eq(z1, ind_elem(a)) for a in members])
        rest = [(_eq(z1, ind_elem(a), False), _in(z1, nv))
                for a in members]
        add("finite-sets", Universal((z1,), tuple([first] + rest)))

    # composite facet expressions agree with their facet variables,
    # relative to the datatype they constrain
    for fe in sig.facet_exprs:
        add("facet-exprs", _facet_expr_universal(fe))

    return tuple(ground), tuple(groups), tuple(witnesses)


def _facet_expr_universal(fe: dl.FacetExpr) -> Universal:
    z1 = bound_var(1)
    fv = facet_expr_set(fe)
    dv = datatype_set(fe.datatype)
    expansion = facet_expansion(fe, z1)
    clauses: list[Clause] = [(_in(z1, fv, False), _in(z1, dv))]
    for c in expansion:
        clauses.append((_in(z1, fv, False), *c))
    n_choices = 1
    for c in expansion:
        n_choices *= len(c)
    if n_choices > FACET_EXPANSION_CAP:
        raise CapacityError("facet expression expands past the cap")
    seen: set[frozenset] = set()
    for choice in itertools.product(*expansion):
        lits = tuple(l.negate() for l in choice) + (
            _in(z1, fv), _in(z1, dv, False))
        key = frozenset(lits)
        if len(key) < len(lits):        # a literal twice: drop duplicates
            lits = tuple(dict.fromkeys(lits))
        if any(l.negate() in key for l in lits):
            continue                    # tautological choice clause
        if key in seen:
            continue
        seen.add(key)
        clauses.append(lits)
    return Universal((z1,), tuple(clauses))


# ---------------------------------------------------------------------------
# whole-KB translation

@dataclass
class Translation:
    formula: KbFormula
    per_statement: tuple          # (statement, Universal | ground lits) pairs
    background_groups: tuple      # (tag, Universal) pairs


def translate_kb(kb: KnowledgeBase) -> Translation:
    """Normalized KB to its consistency formula."""
    per_statement = []
    ground: list[Lit] = []
    universals: list[Universal] = []
    for stmt in kb.statements:
        tr = translate_statement(stmt)
        per_statement.append((stmt, tr))
        if isinstance(tr, Universal):
            universals.append(tr)
        else:
            ground.extend(tr)
    sig = collect_signature(kb)
    bg_ground, groups, witnesses = background(sig)
    ground.extend(bg_ground)
    universals.extend(u for _, u in groups)
    formula = KbFormula(tuple(ground), tuple(universals), witnesses)
    return Translation(formula, tuple(per_statement), groups)


# ---------------------------------------------------------------------------
# queries and substitutions

def _query_term_elem(t: dl.QTerm) -> ElemVar:
    if t.kind == "var":
        return query_elem(t.name, t.sort)
    if t.kind == "ind":
        return ind_elem(t.name)
    return const_elem(t.name)


def translate_query(q: Query) -> tuple[Lit, ...]:
    """Conjunction of query literals over element variables."""
    out: list[Lit] = []
    for lit in q.literals:
        if isinstance(lit, dl.QConcept):
            out.append(_in(_query_term_elem(lit.arg), concept_set(lit.pred),
                           lit.positive))
        elif isinstance(lit, dl.QData):
            out.append(_in(_query_term_elem(lit.arg), datatype_set(lit.pred),
                           lit.positive))
        elif isinstance(lit, dl.QRole):
            rel = UNIV_REL if lit.pred == "U" else arole_rel(lit.pred)
            out.append(_pair(_query_term_elem(lit.a), _query_term_elem(lit.b),
                             rel, lit.positive))
        elif isinstance(lit, dl.QCRole):
            out.append(_pair(_query_term_elem(lit.a), _query_term_elem(lit.b),
                             crole_rel(lit.pred), lit.positive))
        else:
            out.append(_eq(_query_term_elem(lit.a), _query_term_elem(lit.b),
                           lit.positive))
    return tuple(out)


def encode_substitution(subst: dict[str, dl.QTerm],
                        q: Query) -> dict[ElemVar, ElemVar]:
    """DL-level substitution to an element-variable substitution."""
    enc: dict[ElemVar, ElemVar] = {}
    for v in dl.query_vars(q):
        if v.name in subst:
            enc[query_elem(v.name, v.sort)] = _query_term_elem(subst[v.name])
    return enc


def decode_element(e: ElemVar):
    """Inverse of the element-variable encoding: (kind, name) or None."""
    if e.key[0] == "ind":
        return ("ind", e.key[1])
    if e.key[0] == "const":
        return ("const", e.key[1])
    if e.key[0] == "qvar":
        return ("var", e.key[1])
    return None


def query_var_sort(v: ElemVar) -> str:
    """'a' for an abstract query variable, 'c' for a concrete one."""
    return v.key[2]
