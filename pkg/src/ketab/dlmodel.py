"""AST for the description logic: terms, statements, knowledge bases, queries.

Terms are immutable and structurally hashable so they can key variable
tables.  Individuals, constants, facet names and all other identifiers are
plain strings; constants are tied to their datatype by the signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# concept terms

@dataclass(frozen=True)
class ConceptName:
    name: str

@dataclass(frozen=True)
class Top:
    pass

@dataclass(frozen=True)
class Bottom:
    pass

@dataclass(frozen=True)
class ConceptNot:
    arg: "Concept"

@dataclass(frozen=True)
class ConceptOr:
    left: "Concept"
    right: "Concept"

@dataclass(frozen=True)
class ConceptAnd:
    left: "Concept"
    right: "Concept"

@dataclass(frozen=True)
class NominalSet:
    """Finite set of individuals used as a concept."""
    members: tuple[str, ...]

@dataclass(frozen=True)
class SelfConcept:
    """Elements related to themselves by the role."""
    role: "Role"

@dataclass(frozen=True)
class ValueConcept:
    """Elements with the named individual as a role successor."""
    role: "Role"
    individual: str

@dataclass(frozen=True)
class DataValueConcept:
    """Elements with the named constant as a concrete-role successor."""
    crole: "CRole"
    constant: str

Concept = Union[
    ConceptName, Top, Bottom, ConceptNot, ConceptOr, ConceptAnd,
    NominalSet, SelfConcept, ValueConcept, DataValueConcept,
]

# ---------------------------------------------------------------------------
# abstract role terms

@dataclass(frozen=True)
class RoleName:
    name: str

@dataclass(frozen=True)
class UniversalRole:
    pass

@dataclass(frozen=True)
class RoleInv:
    arg: "Role"

@dataclass(frozen=True)
class RoleNot:
    arg: "Role"

@dataclass(frozen=True)
class RoleOr:
    left: "Role"
    right: "Role"

@dataclass(frozen=True)
class RoleAnd:
    left: "Role"
    right: "Role"

@dataclass(frozen=True)
class RoleDomRestr:
    """Role restricted to pairs whose first component lies in the concept."""
    role: "Role"
    concept: Concept

@dataclass(frozen=True)
class RoleRanRestr:
    role: "Role"
    concept: Concept

@dataclass(frozen=True)
class RoleRestr:
    role: "Role"
    dom: Concept
    ran: Concept

@dataclass(frozen=True)
class RoleId:
    """Identity relation on the concept's elements."""
    concept: Concept

@dataclass(frozen=True)
class RoleProd:
    """Cartesian product of two concepts."""
    dom: Concept
    ran: Concept

Role = Union[
    RoleName, UniversalRole, RoleInv, RoleNot, RoleOr, RoleAnd,
    RoleDomRestr, RoleRanRestr, RoleRestr, RoleId, RoleProd,
]

# ---------------------------------------------------------------------------
# concrete role terms

@dataclass(frozen=True)
class CRoleName:
    name: str

@dataclass(frozen=True)
class CRoleNot:
    arg: "CRole"

@dataclass(frozen=True)
class CRoleOr:
    left: "CRole"
    right: "CRole"

@dataclass(frozen=True)
class CRoleAnd:
    left: "CRole"
    right: "CRole"

@dataclass(frozen=True)
class CRoleDomRestr:
    crole: "CRole"
    concept: Concept

@dataclass(frozen=True)
class CRoleRanRestr:
    crole: "CRole"
    data: "Data"

@dataclass(frozen=True)
class CRoleRestr:
    crole: "CRole"
    dom: Concept
    ran: "Data"

CRole = Union[
    CRoleName, CRoleNot, CRoleOr, CRoleAnd,
    CRoleDomRestr, CRoleRanRestr, CRoleRestr,
]

# ---------------------------------------------------------------------------
# datatype terms

@dataclass(frozen=True)
class FacetLit:
    """One literal of a facet expression: a facet name or a datatype bound."""
    kind: str            # "facet" | "top" | "bot"
    name: str            # facet name, empty for top/bot
    positive: bool

@dataclass(frozen=True)
class DatatypeName:
    name: str

@dataclass(frozen=True)
class DataName:
    """Named data range introduced during normalization, never user-written."""
    name: str

@dataclass(frozen=True)
class DataTop:
    """All values of one datatype."""
    datatype: str

@dataclass(frozen=True)
class DataBottom:
    datatype: str

@dataclass(frozen=True)
class FacetExpr:
    """CNF combination of facet literals, scoped to one datatype."""
    datatype: str
    clauses: tuple[tuple[FacetLit, ...], ...]

@dataclass(frozen=True)
class Enumeration:
    """Finite set of constants used as a data range."""
    members: tuple[str, ...]

@dataclass(frozen=True)
class DataNot:
    arg: "Data"

@dataclass(frozen=True)
class DataOr:
    left: "Data"
    right: "Data"

@dataclass(frozen=True)
class DataAnd:
    left: "Data"
    right: "Data"

Data = Union[
    DatatypeName, DataName, DataTop, DataBottom, FacetExpr, Enumeration,
    DataNot, DataOr, DataAnd,
]

# ---------------------------------------------------------------------------
# atoms

def is_concept_atom(c: Concept) -> bool:
    """Concept terms the translator accepts without rewriting."""
    return isinstance(c, (ConceptName, Top, Bottom, NominalSet))

def is_role_atom(r: Role) -> bool:
    return isinstance(r, (RoleName, UniversalRole))

def is_crole_atom(p: CRole) -> bool:
    return isinstance(p, CRoleName)

def is_data_atom(t: Data) -> bool:
    return isinstance(t, (DatatypeName, DataName, DataTop, DataBottom,
                          FacetExpr, Enumeration))

# ---------------------------------------------------------------------------
# statements

@dataclass(frozen=True)
class ConceptEquiv:
    lhs: Concept
    rhs: Concept

@dataclass(frozen=True)
class ConceptSub:
    lhs: Concept
    rhs: Concept

@dataclass(frozen=True)
class SubAllValues:
    """lhs is contained in the elements all of whose successors hit filler."""
    lhs: Concept
    role: Union[Role, CRole]
    filler: Union[Concept, "Data"]

@dataclass(frozen=True)
class ExistsSub:
    """Elements with some filler successor are contained in rhs."""
    role: Union[Role, CRole]
    filler: Union[Concept, "Data"]
    rhs: Concept

@dataclass(frozen=True)
class MinCardSub:
    """Elements with at least n distinct filler successors lie in rhs."""
    n: int
    role: Union[Role, CRole]
    filler: Union[Concept, "Data"]
    rhs: Concept

@dataclass(frozen=True)
class SubMaxCard:
    """lhs elements have at most n distinct filler successors."""
    lhs: Concept
    n: int
    role: Union[Role, CRole]
    filler: Union[Concept, "Data"]

@dataclass(frozen=True)
class RoleEquiv:
    lhs: Role
    rhs: Role

@dataclass(frozen=True)
class RoleSub:
    lhs: Role
    rhs: Role

@dataclass(frozen=True)
class RoleChainSub:
    """Composition of the chain is contained in the superrole."""
    chain: tuple[Role, ...]
    rhs: Role

@dataclass(frozen=True)
class RoleProp:
    """Named property of an abstract role: ref, irref, sym, asym, tra, fun."""
    kind: str
    role: Role

@dataclass(frozen=True)
class RoleDis:
    r1: Role
    r2: Role

@dataclass(frozen=True)
class CRoleEquiv:
    lhs: CRole
    rhs: CRole

@dataclass(frozen=True)
class CRoleSub:
    lhs: CRole
    rhs: CRole

@dataclass(frozen=True)
class CRoleProp:
    """Named property of a concrete role: fun."""
    kind: str
    crole: CRole

@dataclass(frozen=True)
class CRoleDis:
    p1: CRole
    p2: CRole

@dataclass(frozen=True)
class DataEquiv:
    lhs: Data
    rhs: Data

@dataclass(frozen=True)
class DataSub:
    lhs: Data
    rhs: Data

@dataclass(frozen=True)
class ConceptAssertion:
    individual: str
    concept: Concept

@dataclass(frozen=True)
class RoleAssertion:
    a: str
    b: str
    role: Role
    positive: bool = True

@dataclass(frozen=True)
class IndEq:
    """Agreement or disagreement of two individuals."""
    a: str
    b: str
    positive: bool = True

@dataclass(frozen=True)
class ConstAssertion:
    constant: str
    data: Data

@dataclass(frozen=True)
class CRoleAssertion:
    individual: str
    constant: str
    crole: CRole
    positive: bool = True

Statement = Union[
    ConceptEquiv, ConceptSub, SubAllValues, ExistsSub, MinCardSub, SubMaxCard,
    RoleEquiv, RoleSub, RoleChainSub, RoleProp, RoleDis,
    CRoleEquiv, CRoleSub, CRoleProp, CRoleDis,
    DataEquiv, DataSub,
    ConceptAssertion, RoleAssertion, IndEq, ConstAssertion, CRoleAssertion,
]

TBOX_TYPES = (ConceptEquiv, ConceptSub, SubAllValues, ExistsSub, MinCardSub,
              SubMaxCard, DataEquiv, DataSub)
RBOX_TYPES = (RoleEquiv, RoleSub, RoleChainSub, RoleProp, RoleDis,
              CRoleEquiv, CRoleSub, CRoleProp, CRoleDis)
ABOX_TYPES = (ConceptAssertion, RoleAssertion, IndEq, ConstAssertion,
              CRoleAssertion)

CONCEPT_TERM_TYPES = (ConceptName, Top, Bottom, NominalSet, ConceptNot,
                      ConceptOr, ConceptAnd, SelfConcept, ValueConcept,
                      DataValueConcept)
ROLE_TERM_TYPES = (RoleName, UniversalRole, RoleInv, RoleNot, RoleOr, RoleAnd,
                   RoleDomRestr, RoleRanRestr, RoleRestr, RoleId, RoleProd)
CROLE_TERM_TYPES = (CRoleName, CRoleNot, CRoleOr, CRoleAnd, CRoleDomRestr,
                    CRoleRanRestr, CRoleRestr)
DATA_TERM_TYPES = (DatatypeName, DataName, DataTop, DataBottom, FacetExpr,
                   Enumeration, DataNot, DataOr, DataAnd)

# ---------------------------------------------------------------------------
# signature and knowledge base

@dataclass(frozen=True)
class DatatypeDecl:
    name: str
    constants: tuple[str, ...] = ()
    facets: tuple[str, ...] = ()

@dataclass(frozen=True)
class KnowledgeBase:
    concepts: tuple[str, ...] = ()
    aroles: tuple[str, ...] = ()
    croles: tuple[str, ...] = ()
    individuals: tuple[str, ...] = ()
    datatypes: tuple[DatatypeDecl, ...] = ()
    statements: tuple[Statement, ...] = ()
    datanames: tuple[str, ...] = ()      # generated data ranges, no declaration

    def datatype(self, name: str) -> DatatypeDecl:
        for d in self.datatypes:
            if d.name == name:
                return d
        raise KeyError(name)

    def constants(self) -> tuple[str, ...]:
        return tuple(c for d in self.datatypes for c in d.constants)

    def constant_datatype(self, const: str) -> str:
        for d in self.datatypes:
            if const in d.constants:
                return d.name
        raise KeyError(const)

    def with_statements(self, statements: tuple[Statement, ...]) -> "KnowledgeBase":
        return KnowledgeBase(self.concepts, self.aroles, self.croles,
                             self.individuals, self.datatypes, statements,
                             self.datanames)

# ---------------------------------------------------------------------------
# queries

@dataclass(frozen=True)
class QTerm:
    """Argument of a query literal: a variable, individual, or constant."""
    kind: str            # "var" | "ind" | "const"
    name: str
    sort: str = "a"      # "a" abstract, "c" concrete

@dataclass(frozen=True)
class QConcept:
    pred: str
    arg: QTerm
    positive: bool = True

@dataclass(frozen=True)
class QData:
    pred: str
    arg: QTerm
    positive: bool = True

@dataclass(frozen=True)
class QRole:
    pred: str
    a: QTerm
    b: QTerm
    positive: bool = True

@dataclass(frozen=True)
class QCRole:
    pred: str
    a: QTerm
    b: QTerm
    positive: bool = True

@dataclass(frozen=True)
class QEq:
    a: QTerm
    b: QTerm
    positive: bool = True

QueryLiteral = Union[QConcept, QData, QRole, QCRole, QEq]

@dataclass(frozen=True)
class Query:
    literals: tuple[QueryLiteral, ...]

def literal_terms(lit: QueryLiteral) -> tuple[QTerm, ...]:
    if isinstance(lit, (QConcept, QData)):
        return (lit.arg,)
    return (lit.a, lit.b)

def query_vars(q: Query) -> tuple[QTerm, ...]:
    """Variables of the query in first-occurrence order, without duplicates."""
    seen: dict[str, QTerm] = {}
    for lit in q.literals:
        for t in literal_terms(lit):
            if t.kind == "var" and t.name not in seen:
                seen[t.name] = t
    return tuple(seen.values())

def apply_substitution(q: Query, subst: dict[str, QTerm]) -> Query:
    """Replace variables by individuals or constants; partial maps allowed."""
    def sub_term(t: QTerm) -> QTerm:
        if t.kind == "var" and t.name in subst:
            r = subst[t.name]
            if r.sort != t.sort:
                raise ValueError(f"sort mismatch substituting {t.name}")
            return r
        return t

    out: list[QueryLiteral] = []
    for lit in q.literals:
        if isinstance(lit, (QConcept, QData)):
            out.append(type(lit)(lit.pred, sub_term(lit.arg), lit.positive))
        elif isinstance(lit, QEq):
            out.append(QEq(sub_term(lit.a), sub_term(lit.b), lit.positive))
        else:
            out.append(type(lit)(lit.pred, sub_term(lit.a), sub_term(lit.b),
                                 lit.positive))
    return Query(tuple(out))

# ---------------------------------------------------------------------------
# normalized-shape predicate

def _atom_filler_ok(role, filler) -> bool:
    if isinstance(role, (RoleName, UniversalRole)):
        return is_concept_atom(filler)
    if isinstance(role, CRoleName):
        return is_data_atom(filler)
    return False

def is_normalized(stmt: Statement) -> bool:
    """Shape test for the statement vocabulary the translator accepts."""
    if isinstance(stmt, ConceptEquiv):
        if not isinstance(stmt.lhs, ConceptName):
            return False
        r = stmt.rhs
        if is_concept_atom(r):
            return True
        if isinstance(r, ConceptNot):
            return is_concept_atom(r.arg)
        if isinstance(r, ConceptOr):
            return is_concept_atom(r.left) and is_concept_atom(r.right)
        if isinstance(r, SelfConcept):
            return is_role_atom(r.role)
        if isinstance(r, ValueConcept):
            return is_role_atom(r.role)
        if isinstance(r, DataValueConcept):
            return is_crole_atom(r.crole)
        return False
    if isinstance(stmt, SubAllValues):
        return is_concept_atom(stmt.lhs) and _atom_filler_ok(stmt.role, stmt.filler)
    if isinstance(stmt, ExistsSub):
        return is_concept_atom(stmt.rhs) and _atom_filler_ok(stmt.role, stmt.filler)
    if isinstance(stmt, MinCardSub):
        return is_concept_atom(stmt.rhs) and _atom_filler_ok(stmt.role, stmt.filler)
    if isinstance(stmt, SubMaxCard):
        return is_concept_atom(stmt.lhs) and _atom_filler_ok(stmt.role, stmt.filler)
    if isinstance(stmt, ConceptSub):
        return False
    if isinstance(stmt, RoleEquiv):
        if not isinstance(stmt.lhs, RoleName):
            return False
        r = stmt.rhs
        if is_role_atom(r):
            return True
        if isinstance(r, (RoleNot, RoleInv)):
            return is_role_atom(r.arg)
        if isinstance(r, RoleOr):
            return is_role_atom(r.left) and is_role_atom(r.right)
        if isinstance(r, (RoleDomRestr, RoleRanRestr)):
            return is_role_atom(r.role) and is_concept_atom(r.concept)
        if isinstance(r, RoleRestr):
            return (is_role_atom(r.role) and is_concept_atom(r.dom)
                    and is_concept_atom(r.ran))
        if isinstance(r, RoleId):
            return is_concept_atom(r.concept)
        if isinstance(r, RoleProd):
            return is_concept_atom(r.dom) and is_concept_atom(r.ran)
        return False
    if isinstance(stmt, RoleChainSub):
        return (all(isinstance(r, RoleName) for r in stmt.chain)
                and isinstance(stmt.rhs, RoleName) and len(stmt.chain) >= 1)
    if isinstance(stmt, RoleSub):
        return is_role_atom(stmt.lhs) and is_role_atom(stmt.rhs)
    if isinstance(stmt, RoleProp):
        return stmt.kind in ("ref", "irref", "fun") and is_role_atom(stmt.role)
    if isinstance(stmt, RoleDis):
        return is_role_atom(stmt.r1) and is_role_atom(stmt.r2)
    if isinstance(stmt, CRoleEquiv):
        if not isinstance(stmt.lhs, CRoleName):
            return False
        r = stmt.rhs
        if is_crole_atom(r):
            return True
        if isinstance(r, CRoleNot):
            return is_crole_atom(r.arg)
        if isinstance(r, CRoleOr):
            return is_crole_atom(r.left) and is_crole_atom(r.right)
        if isinstance(r, CRoleDomRestr):
            return is_crole_atom(r.crole) and is_concept_atom(r.concept)
        if isinstance(r, CRoleRanRestr):
            return is_crole_atom(r.crole) and is_data_atom(r.data)
        if isinstance(r, CRoleRestr):
            return (is_crole_atom(r.crole) and is_concept_atom(r.dom)
                    and is_data_atom(r.ran))
        return False
    if isinstance(stmt, CRoleSub):
        return is_crole_atom(stmt.lhs) and is_crole_atom(stmt.rhs)
    if isinstance(stmt, CRoleProp):
        return stmt.kind == "fun" and is_crole_atom(stmt.crole)
    if isinstance(stmt, CRoleDis):
        return is_crole_atom(stmt.p1) and is_crole_atom(stmt.p2)
    if isinstance(stmt, DataEquiv):
        if not is_data_atom(stmt.lhs):
            return False
        r = stmt.rhs
        if is_data_atom(r):
            return True
        if isinstance(r, DataNot):
            return is_data_atom(r.arg)
        if isinstance(r, (DataOr, DataAnd)):
            return is_data_atom(r.left) and is_data_atom(r.right)
        return False
    if isinstance(stmt, DataSub):
        return False
    if isinstance(stmt, ConceptAssertion):
        return is_concept_atom(stmt.concept)
    if isinstance(stmt, RoleAssertion):
        return is_role_atom(stmt.role)
    if isinstance(stmt, IndEq):
        return True
    if isinstance(stmt, ConstAssertion):
        return is_data_atom(stmt.data)
    if isinstance(stmt, CRoleAssertion):
        return is_crole_atom(stmt.crole)
    return False
