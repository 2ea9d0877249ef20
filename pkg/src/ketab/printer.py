"""Text emission for terms, statements, KBs, and queries.

Output uses the same surface syntax the parser reads, so printing a KB and
parsing it back yields an equal AST (generated `__` names excepted, since
the parser refuses them in user input).
"""

from __future__ import annotations

from .dlmodel import (
    Bottom, ConceptAnd, ConceptAssertion, ConceptEquiv, ConceptName,
    ConceptNot, ConceptOr, ConceptSub, CRoleAnd, CRoleAssertion, CRoleDis,
    CRoleDomRestr, CRoleEquiv, CRoleName, CRoleNot, CRoleOr, CRoleProp,
    CRoleRanRestr, CRoleRestr, CRoleSub, ConstAssertion, DataAnd,
    DataBottom, DataEquiv,
    DataName, DataNot, DataOr, DataSub, DataTop, DatatypeName,
    DataValueConcept, Enumeration, ExistsSub, FacetExpr, IndEq,
    KnowledgeBase, MinCardSub, NominalSet, Query, QCRole, QConcept, QData,
    QEq, QRole, RoleAnd, RoleAssertion, RoleChainSub, RoleDis, RoleDomRestr,
    RoleEquiv, RoleId, RoleInv, RoleName, RoleNot, RoleOr, RoleProd,
    RoleProp, RoleRanRestr, RoleRestr, RoleSub, SelfConcept, SubAllValues,
    SubMaxCard, Top, UniversalRole, ValueConcept, Statement, QTerm,
)

# precedence: or=1, and=2, prod=3, primary=4
_PREC_OR, _PREC_AND, _PREC_PROD, _PREC_PRIMARY = 1, 2, 3, 4


def _paren(s: str, prec: int, ctx: int) -> str:
    return f"({s})" if prec < ctx else s


def term_text(t, ctx: int = _PREC_OR) -> str:
    """Render any term category with minimal parentheses."""
    if isinstance(t, ConceptName):
        return t.name
    if isinstance(t, Top):
        return "top"
    if isinstance(t, Bottom):
        return "bot"
    if isinstance(t, (ConceptNot, RoleNot, CRoleNot, DataNot)):
        return f"not {term_text(t.arg, _PREC_PRIMARY)}"
    if isinstance(t, (ConceptOr, RoleOr, CRoleOr, DataOr)):
        s = f"{term_text(t.left, _PREC_OR)} or {term_text(t.right, _PREC_AND)}"
        return _paren(s, _PREC_OR, ctx)
    if isinstance(t, (ConceptAnd, RoleAnd, CRoleAnd, DataAnd)):
        s = f"{term_text(t.left, _PREC_AND)} and {term_text(t.right, _PREC_PROD)}"
        return _paren(s, _PREC_AND, ctx)
    if isinstance(t, NominalSet):
        return "{" + ", ".join(t.members) + "}"
    if isinstance(t, SelfConcept):
        return f"some {term_text(t.role, _PREC_PRIMARY)} self"
    if isinstance(t, ValueConcept):
        return f"some {term_text(t.role, _PREC_PRIMARY)} {{{t.individual}}}"
    if isinstance(t, DataValueConcept):
        return f"some {term_text(t.crole, _PREC_PRIMARY)} {{{t.constant}}}"
    if isinstance(t, RoleName):
        return t.name
    if isinstance(t, UniversalRole):
        return "U"
    if isinstance(t, RoleInv):
        return f"inv {term_text(t.arg, _PREC_PRIMARY)}"
    if isinstance(t, RoleDomRestr):
        return f"dres({term_text(t.role)}, {term_text(t.concept)})"
    if isinstance(t, RoleRanRestr):
        return f"rres({term_text(t.role)}, {term_text(t.concept)})"
    if isinstance(t, RoleRestr):
        return (f"res({term_text(t.role)}, {term_text(t.dom)}, "
                f"{term_text(t.ran)})")
    if isinstance(t, RoleId):
        return f"id({term_text(t.concept)})"
    if isinstance(t, RoleProd):
        s = (f"{term_text(t.dom, _PREC_PROD)} prod "
             f"{term_text(t.ran, _PREC_PRIMARY)}")
        return _paren(s, _PREC_PROD, ctx)
    if isinstance(t, CRoleName):
        return t.name
    if isinstance(t, CRoleDomRestr):
        return f"dres({term_text(t.crole)}, {term_text(t.concept)})"
    if isinstance(t, CRoleRanRestr):
        return f"rres({term_text(t.crole)}, {term_text(t.data)})"
    if isinstance(t, CRoleRestr):
        return (f"res({term_text(t.crole)}, {term_text(t.dom)}, "
                f"{term_text(t.ran)})")
    if isinstance(t, (DatatypeName, DataName)):
        return t.name
    if isinstance(t, DataTop):
        return f"top({t.datatype})"
    if isinstance(t, DataBottom):
        return f"bot({t.datatype})"
    if isinstance(t, FacetExpr):
        if len(t.clauses) == 1 and len(t.clauses[0]) == 1:
            prec = _PREC_PRIMARY
        elif len(t.clauses) == 1:
            prec = _PREC_OR
        else:
            prec = _PREC_AND
        return _paren(facet_expr_text(t), prec, ctx)
    if isinstance(t, Enumeration):
        return "{" + ", ".join(t.members) + "}"
    raise TypeError(f"unprintable term {t!r}")


def facet_expr_text(t: FacetExpr) -> str:
    def lit(l) -> str:
        if l.kind == "facet":
            base = l.name
        else:
            base = f"{l.kind}({t.datatype})"
        return base if l.positive else f"not {base}"

    parts = []
    for clause in t.clauses:
        s = " or ".join(lit(l) for l in clause)
        parts.append(f"({s})" if len(clause) > 1 and len(t.clauses) > 1 else s)
    return " and ".join(parts)


def _quant_text(n: int, kind: str, role, filler) -> str:
    head = {"some": "some", "all": "all"}.get(kind, kind)
    num = f" {n}" if kind in ("atleast", "atmost") else ""
    return f"{head}{num} {term_text(role, _PREC_PRIMARY)} " \
           f"{term_text(filler, _PREC_PRIMARY)}"


def statement_text(s: Statement) -> str:
    if isinstance(s, ConceptEquiv):
        return f"axiom {term_text(s.lhs)} equiv {term_text(s.rhs)}."
    if isinstance(s, ConceptSub):
        return f"axiom {term_text(s.lhs)} sub {term_text(s.rhs)}."
    if isinstance(s, SubAllValues):
        return (f"axiom {term_text(s.lhs)} sub "
                f"{_quant_text(0, 'all', s.role, s.filler)}.")
    if isinstance(s, ExistsSub):
        return (f"axiom {_quant_text(0, 'some', s.role, s.filler)} sub "
                f"{term_text(s.rhs)}.")
    if isinstance(s, MinCardSub):
        return (f"axiom {_quant_text(s.n, 'atleast', s.role, s.filler)} sub "
                f"{term_text(s.rhs)}.")
    if isinstance(s, SubMaxCard):
        return (f"axiom {term_text(s.lhs)} sub "
                f"{_quant_text(s.n, 'atmost', s.role, s.filler)}.")
    if isinstance(s, (RoleEquiv, CRoleEquiv, DataEquiv)):
        return f"axiom {term_text(s.lhs)} equiv {term_text(s.rhs)}."
    if isinstance(s, (RoleSub, CRoleSub, DataSub)):
        return f"axiom {term_text(s.lhs)} sub {term_text(s.rhs)}."
    if isinstance(s, RoleChainSub):
        chain = ", ".join(term_text(r) for r in s.chain)
        return f"axiom {chain} sub {term_text(s.rhs)}."
    if isinstance(s, RoleProp):
        return f"axiom {s.kind}({term_text(s.role)})."
    if isinstance(s, RoleDis):
        return f"axiom dis({term_text(s.r1)}, {term_text(s.r2)})."
    if isinstance(s, CRoleProp):
        return f"axiom {s.kind}({term_text(s.crole)})."
    if isinstance(s, CRoleDis):
        return f"axiom dis({term_text(s.p1)}, {term_text(s.p2)})."
    if isinstance(s, ConceptAssertion):
        return f"assert {s.individual} : {term_text(s.concept)}."
    if isinstance(s, RoleAssertion):
        neg = "" if s.positive else "not "
        return f"assert ({s.a}, {s.b}) : {neg}{term_text(s.role, _PREC_PRIMARY)}."
    if isinstance(s, IndEq):
        op = "=" if s.positive else "!="
        return f"assert {s.a} {op} {s.b}."
    if isinstance(s, ConstAssertion):
        return f"assert {s.constant} : {term_text(s.data)}."
    if isinstance(s, CRoleAssertion):
        neg = "" if s.positive else "not "
        return (f"assert ({s.individual}, {s.constant}) : "
                f"{neg}{term_text(s.crole, _PREC_PRIMARY)}.")
    raise TypeError(f"unprintable statement {s!r}")


def kb_text(kb: KnowledgeBase) -> str:
    lines: list[str] = []
    if kb.concepts:
        lines.append("concept " + ", ".join(kb.concepts) + ".")
    if kb.aroles:
        lines.append("arole " + ", ".join(kb.aroles) + ".")
    if kb.croles:
        lines.append("crole " + ", ".join(kb.croles) + ".")
    if kb.individuals:
        lines.append("individual " + ", ".join(kb.individuals) + ".")
    for d in kb.datatypes:
        parts = []
        if d.constants:
            parts.append("constants " + ", ".join(d.constants) + ";")
        if d.facets:
            parts.append("facets " + ", ".join(d.facets) + ";")
        body = " " + " ".join(parts) + " " if parts else " "
        lines.append(f"datatype {d.name} {{{body}}}")
    if kb.datanames:
        lines.append("dataname " + ", ".join(kb.datanames) + ".")
    for s in kb.statements:
        lines.append(statement_text(s))
    return "\n".join(lines) + "\n"


def _qterm_text(t: QTerm) -> str:
    return f"?{t.name}" if t.kind == "var" else t.name


def query_text(q: Query) -> str:
    parts = []
    for lit in q.literals:
        if isinstance(lit, (QConcept, QData)):
            s = f"{lit.pred}({_qterm_text(lit.arg)})"
            parts.append(s if lit.positive else f"not {s}")
        elif isinstance(lit, (QRole, QCRole)):
            s = f"{lit.pred}({_qterm_text(lit.a)}, {_qterm_text(lit.b)})"
            parts.append(s if lit.positive else f"not {s}")
        else:
            op = "=" if lit.positive else "!="
            parts.append(f"{_qterm_text(lit.a)} {op} {_qterm_text(lit.b)}")
    return " and ".join(parts)
