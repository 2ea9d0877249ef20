"""Parser for knowledge-base (.dlkb) and query (.dlq) text.

A KB file declares its signature first (concept/arole/crole/individual/
datatype lines), then lists `axiom` and `assert` statements.  Names resolve
against the declared signature, so term categories never need annotations.
Generated-name prefixes (`__`) are rejected in user input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dlmodel import (
    Bottom, ConceptAnd, ConceptAssertion, ConceptEquiv, ConceptName,
    ConceptNot, ConceptOr, ConceptSub, CRoleAnd, CRoleAssertion, CRoleDis,
    CRoleDomRestr, CRoleEquiv, CRoleName, CRoleNot, CRoleOr, CRoleProp,
    CRoleRanRestr, CRoleRestr, CRoleSub, ConstAssertion, DataAnd,
    DataBottom, DataEquiv, DataName,
    DataNot, DataOr, DataSub, DataTop, DatatypeDecl, DatatypeName,
    DataValueConcept, Enumeration, ExistsSub, FacetExpr, FacetLit, IndEq,
    KnowledgeBase, MinCardSub, NominalSet, Query, QCRole, QConcept, QData,
    QEq, QRole, QTerm, RoleAnd, RoleAssertion, RoleChainSub, RoleDis,
    RoleDomRestr, RoleEquiv, RoleId, RoleInv, RoleName, RoleNot, RoleOr,
    RoleProd, RoleProp, RoleRanRestr, RoleRestr, RoleSub, SelfConcept,
    SubAllValues, SubMaxCard, Top, UniversalRole, ValueConcept,
)
from .errors import ParseError, UnknownNameError

MAX_CARDINALITY = 16

KEYWORDS = {
    "concept", "arole", "crole", "individual", "datatype", "dataname",
    "constants",
    "facets", "axiom", "assert", "equiv", "sub", "and", "or", "not", "inv",
    "id", "prod", "dres", "rres", "res", "all", "some", "self", "atleast",
    "atmost", "top", "bot", "ref", "irref", "sym", "asym", "tra", "fun",
    "dis", "U",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<neq>!=)
  | (?P<punct>[.,;:=(){}])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str            # "ident" | "num" | "var" | punct literal | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct" or kind == "neq":
                tokens.append(Token(tok, tok, line, col))
            else:
                tokens.append(Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# untyped expression trees, resolved to term categories afterwards

@dataclass(frozen=True)
class _Name:
    name: str
    line: int
    col: int

@dataclass(frozen=True)
class _Op:
    op: str                      # "not" "inv" "and" "or" "prod" "id" ...
    args: tuple
    line: int
    col: int

@dataclass(frozen=True)
class _Set:
    members: tuple[str, ...]
    line: int
    col: int

@dataclass(frozen=True)
class _Quant:
    kind: str                    # "some" | "all" | "atleast" | "atmost"
    n: int
    role: object
    filler: object               # expression or "self"
    line: int
    col: int


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, tokens: list[Token], allow_generated: bool = False):
        self.tokens = tokens
        self.i = 0
        self.allow_generated = allow_generated

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text == word

    def take_word(self, word: str) -> bool:
        if self.at_word(word):
            self.next()
            return True
        return False

    def name_token(self) -> Token:
        t = self.expect("ident")
        if t.text in KEYWORDS:
            raise ParseError(f"{t.text!r} is a reserved word", t.line, t.col)
        if t.text.startswith("__") and not self.allow_generated:
            raise ParseError("names starting with '__' are reserved for "
                             "generated names", t.line, t.col)
        return t

    # -- expressions ------------------------------------------------------

    def expr(self):
        return self.expr_or()

    def expr_or(self):
        left = self.expr_and()
        while self.at_word("or"):
            t = self.next()
            right = self.expr_and()
            left = _Op("or", (left, right), t.line, t.col)
        return left

    def expr_and(self):
        left = self.expr_prod()
        while self.at_word("and"):
            t = self.next()
            right = self.expr_prod()
            left = _Op("and", (left, right), t.line, t.col)
        return left

    def expr_prod(self):
        left = self.expr_primary()
        while self.at_word("prod"):
            t = self.next()
            right = self.expr_primary()
            left = _Op("prod", (left, right), t.line, t.col)
        return left

    def expr_primary(self):
        t = self.peek()
        if t.kind == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "{":
            return self.set_literal()
        if t.kind == "ident":
            if t.text == "not":
                self.next()
                return _Op("not", (self.expr_primary(),), t.line, t.col)
            if t.text == "inv":
                self.next()
                return _Op("inv", (self.expr_primary(),), t.line, t.col)
            if t.text in ("id", "dres", "rres", "res", "top", "bot"):
                return self.func_form()
            if t.text in ("some", "all", "atleast", "atmost"):
                return self.quant_form()
            if t.text == "self":
                raise ParseError("'self' is only allowed as a quantifier filler",
                                 t.line, t.col)
            if t.text == "U":
                self.next()
                return _Name("U", t.line, t.col)
            return _Name(self.name_token().text, t.line, t.col)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.line, t.col)

    def func_form(self):
        t = self.next()
        if t.text in ("top", "bot") and not self.at("("):
            return _Op(t.text, (), t.line, t.col)     # bare concept top/bot
        self.expect("(")
        args = [self.expr()]
        while self.at(","):
            self.next()
            args.append(self.expr())
        self.expect(")")
        arity = {"id": 1, "dres": 2, "rres": 2, "res": 3, "top": 1, "bot": 1}
        if len(args) != arity[t.text]:
            raise ParseError(f"{t.text} takes {arity[t.text]} argument(s)",
                             t.line, t.col)
        return _Op(t.text, tuple(args), t.line, t.col)

    def quant_form(self):
        t = self.next()
        n = 0
        if t.text in ("atleast", "atmost"):
            num = self.expect("num")
            n = int(num.text)
            if not 1 <= n <= MAX_CARDINALITY:
                raise ParseError(f"cardinality must be in 1..{MAX_CARDINALITY}",
                                 num.line, num.col)
        role = self.expr_primary()
        if self.at_word("self"):
            self.next()
            filler = "self"
            if t.text != "some":
                raise ParseError("'self' only combines with 'some'", t.line, t.col)
        else:
            filler = self.expr_primary()
        return _Quant(t.text, n, role, filler, t.line, t.col)

    def set_literal(self):
        t = self.expect("{")
        members = [self.name_token().text]
        while self.at(","):
            self.next()
            m = self.name_token().text
            if m not in members:        # {a, a} denotes the same set as {a}
                members.append(m)
        self.expect("}")
        return _Set(tuple(members), t.line, t.col)


# ---------------------------------------------------------------------------
# signature-aware resolution

class _Sig:
    """Declared names and their categories."""

    def __init__(self):
        self.concepts: list[str] = []
        self.aroles: list[str] = []
        self.croles: list[str] = []
        self.individuals: list[str] = []
        self.datatypes: list[DatatypeDecl] = []
        self.datanames: list[str] = []
        self.category: dict[str, str] = {}
        self.facet_dt: dict[str, str] = {}
        self.const_dt: dict[str, str] = {}

    def declare(self, name: str, cat: str, tok: Token):
        if name in self.category:
            raise ParseError(f"{name!r} already declared as {self.category[name]}",
                             tok.line, tok.col)
        self.category[name] = cat

    def cat(self, node: _Name) -> str:
        if node.name == "U":
            return "arole"
        c = self.category.get(node.name)
        if c is None:
            raise UnknownNameError(f"undeclared name {node.name!r}",
                                   node.line, node.col)
        return c


def _is_facet_leaf(sig: _Sig, node) -> bool:
    if isinstance(node, _Name):
        return sig.cat(node) == "facet"
    if isinstance(node, _Op) and node.op in ("top", "bot") and node.args:
        a = node.args[0]
        return isinstance(a, _Name) and sig.cat(a) == "datatype"
    return False


def _pure_facet(sig: _Sig, node) -> bool:
    if _is_facet_leaf(sig, node):
        return True
    if isinstance(node, _Op) and node.op in ("and", "or", "not"):
        return all(_pure_facet(sig, a) for a in node.args)
    return False


def _facet_tree_datatype(sig: _Sig, node) -> str | None:
    if isinstance(node, _Name):
        return sig.facet_dt[node.name]
    if isinstance(node, _Op):
        if node.op in ("top", "bot"):
            return node.args[0].name
        for a in node.args:
            d = _facet_tree_datatype(sig, a)
            if d is not None:
                return d
    return None


def _facet_literal(sig: _Sig, node, dt: str) -> FacetLit:
    neg = False
    while isinstance(node, _Op) and node.op == "not":
        neg = not neg
        node = node.args[0]
    if isinstance(node, _Name):
        if sig.facet_dt[node.name] != dt:
            raise ParseError(f"facet {node.name!r} belongs to another datatype",
                             node.line, node.col)
        return FacetLit("facet", node.name, not neg)
    if isinstance(node, _Op) and node.op in ("top", "bot"):
        if node.args[0].name != dt:
            raise ParseError("datatype bound belongs to another datatype",
                             node.line, node.col)
        return FacetLit(node.op, "", not neg)
    raise ParseError("facet expression must be in CNF", node.line, node.col)


def _facet_cnf(sig: _Sig, node, dt: str) -> tuple[tuple[FacetLit, ...], ...]:
    """Check CNF shape and flatten: conjunction of disjunctions of literals."""
    def clause(n) -> tuple[FacetLit, ...]:
        if isinstance(n, _Op) and n.op == "or":
            return clause(n.args[0]) + clause(n.args[1])
        return (_facet_literal(sig, n, dt),)

    if isinstance(node, _Op) and node.op == "and":
        return _facet_cnf(sig, node.args[0], dt) + _facet_cnf(sig, node.args[1], dt)
    return (clause(node),)


def _resolve_facet_expr(sig: _Sig, node) -> FacetExpr:
    dt = _facet_tree_datatype(sig, node)
    if dt is None:
        raise ParseError("cannot infer the datatype of a facet expression",
                         _node_line(node), _node_col(node))
    return FacetExpr(dt, _facet_cnf(sig, node, dt))


def _node_line(node) -> int:
    return getattr(node, "line", 0)

def _node_col(node) -> int:
    return getattr(node, "col", 0)


def _infer_cat(sig: _Sig, node) -> str:
    """Term category of an expression: concept, arole, crole, or data."""
    if isinstance(node, _Name):
        c = sig.cat(node)
        if c in ("facet", "datatype", "dataname"):
            return "data"
        if c in ("individual", "constant"):
            raise ParseError(f"{node.name!r} cannot be used as a term here",
                             node.line, node.col)
        return c
    if isinstance(node, _Set):
        cats = {sig.category.get(m) for m in node.members}
        if cats == {"individual"}:
            return "concept"
        if cats == {"constant"}:
            return "data"
        raise ParseError("set literal must list only individuals or only "
                         "constants", node.line, node.col)
    if isinstance(node, _Quant):
        # self and singleton fillers make first-class concept terms
        if node.kind == "some" and (node.filler == "self"
                                    or isinstance(node.filler, _Set)):
            return "concept"
        return "quant"
    if isinstance(node, _Op):
        if node.op in ("top", "bot"):
            return "data" if node.args else "concept"
        if node.op == "inv":
            return "arole"
        if node.op == "prod":
            return "arole"
        if node.op == "id":
            return "arole"
        if node.op in ("dres", "rres", "res"):
            base = _infer_cat(sig, node.args[0])
            if base not in ("arole", "crole"):
                raise ParseError("restriction applies to a role",
                                 node.line, node.col)
            return base
        # not / and / or: category of the arguments
        cats = {_infer_cat(sig, a) for a in node.args}
        if len(cats) == 2 and cats == {"concept", "data"}:
            raise ParseError("cannot mix concept and data terms",
                             node.line, node.col)
        if len(cats) != 1:
            raise ParseError("cannot mix term categories", node.line, node.col)
        return cats.pop()
    raise ParseError("unexpected expression", _node_line(node), _node_col(node))


def _resolve(sig: _Sig, node, want: str):
    """Build a typed term of category `want` from an untyped tree."""
    if want == "data" and _pure_facet(sig, node):
        return _resolve_facet_expr(sig, node)
    if isinstance(node, _Name):
        c = sig.cat(node)
        if want == "concept" and c == "concept":
            return ConceptName(node.name)
        if want == "arole" and node.name == "U":
            return UniversalRole()
        if want == "arole" and c == "arole":
            return RoleName(node.name)
        if want == "crole" and c == "crole":
            return CRoleName(node.name)
        if want == "data" and c == "datatype":
            return DatatypeName(node.name)
        if want == "data" and c == "dataname":
            return DataName(node.name)
        raise ParseError(f"{node.name!r} is a {c}, expected a {want} term",
                         node.line, node.col)
    if isinstance(node, _Set):
        cat = _infer_cat(sig, node)
        if want == "concept" and cat == "concept":
            return NominalSet(node.members)
        if want == "data" and cat == "data":
            return Enumeration(node.members)
        raise ParseError(f"set literal is not a {want} term", node.line, node.col)
    if isinstance(node, _Quant):
        if _infer_cat(sig, node) != "concept" or want != "concept":
            raise ParseError("quantified term is only allowed on its own side "
                             "of 'sub'", node.line, node.col)
        if node.filler == "self":
            return SelfConcept(_resolve(sig, node.role, "arole"))
        assert isinstance(node.filler, _Set)
        if len(node.filler.members) != 1:
            raise ParseError("a quantifier filler set names one element",
                             node.filler.line, node.filler.col)
        member = node.filler.members[0]
        mcat = sig.category.get(member)
        if mcat == "individual":
            return ValueConcept(_resolve(sig, node.role, "arole"), member)
        if mcat == "constant":
            return DataValueConcept(_resolve(sig, node.role, "crole"), member)
        raise ParseError(f"{member!r} is not an individual or constant",
                         node.filler.line, node.filler.col)
    assert isinstance(node, _Op)
    op = node.op
    if op in ("top", "bot") and not node.args:
        if want != "concept":
            raise ParseError(f"'{op}' is a concept term", node.line, node.col)
        return Top() if op == "top" else Bottom()
    if op in ("top", "bot"):
        if want != "data":
            raise ParseError(f"'{op}(d)' is a data term", node.line, node.col)
        d = node.args[0]
        if not (isinstance(d, _Name) and sig.cat(d) == "datatype"):
            raise ParseError("expected a datatype name", node.line, node.col)
        return DataTop(d.name) if op == "top" else DataBottom(d.name)
    if op == "not":
        a = _resolve(sig, node.args[0], want)
        cls = {"concept": ConceptNot, "arole": RoleNot, "crole": CRoleNot,
               "data": DataNot}[want]
        return cls(a)
    if op in ("and", "or"):
        l = _resolve(sig, node.args[0], want)
        r = _resolve(sig, node.args[1], want)
        cls = {("concept", "and"): ConceptAnd, ("concept", "or"): ConceptOr,
               ("arole", "and"): RoleAnd, ("arole", "or"): RoleOr,
               ("crole", "and"): CRoleAnd, ("crole", "or"): CRoleOr,
               ("data", "and"): DataAnd, ("data", "or"): DataOr}[(want, op)]
        return cls(l, r)
    if op == "inv":
        if want != "arole":
            raise ParseError("'inv' builds an abstract role", node.line, node.col)
        return RoleInv(_resolve(sig, node.args[0], "arole"))
    if op == "id":
        if want != "arole":
            raise ParseError("'id' builds an abstract role", node.line, node.col)
        return RoleId(_resolve(sig, node.args[0], "concept"))
    if op == "prod":
        if want != "arole":
            raise ParseError("'prod' builds an abstract role", node.line, node.col)
        return RoleProd(_resolve(sig, node.args[0], "concept"),
                        _resolve(sig, node.args[1], "concept"))
    if op in ("dres", "rres", "res"):
        base_cat = _infer_cat(sig, node.args[0])
        if want != base_cat:
            raise ParseError(f"restricted role is a {base_cat} term",
                             node.line, node.col)
        if base_cat == "arole":
            r = _resolve(sig, node.args[0], "arole")
            if op == "dres":
                return RoleDomRestr(r, _resolve(sig, node.args[1], "concept"))
            if op == "rres":
                return RoleRanRestr(r, _resolve(sig, node.args[1], "concept"))
            return RoleRestr(r, _resolve(sig, node.args[1], "concept"),
                             _resolve(sig, node.args[2], "concept"))
        p = _resolve(sig, node.args[0], "crole")
        if op == "dres":
            return CRoleDomRestr(p, _resolve(sig, node.args[1], "concept"))
        if op == "rres":
            return CRoleRanRestr(p, _resolve(sig, node.args[1], "data"))
        return CRoleRestr(p, _resolve(sig, node.args[1], "concept"),
                          _resolve(sig, node.args[2], "data"))
    raise ParseError(f"cannot use '{op}' here", node.line, node.col)


def _role_and_filler(sig: _Sig, q: _Quant):
    """Typed (role, filler) pair of a quantified form."""
    rcat = _infer_cat(sig, q.role)
    if rcat == "arole":
        role = _resolve(sig, q.role, "arole")
        if q.filler == "self":
            return role, "self"
        fcat = _infer_cat(sig, q.filler)
        if fcat == "concept":
            return role, _resolve(sig, q.filler, "concept")
        if fcat == "data":
            raise ParseError("abstract role takes a concept filler",
                             q.line, q.col)
        raise ParseError("bad quantifier filler", q.line, q.col)
    if rcat == "crole":
        role = _resolve(sig, q.role, "crole")
        if q.filler == "self":
            raise ParseError("'self' needs an abstract role", q.line, q.col)
        return role, _resolve(sig, q.filler, "data")
    raise ParseError("quantifier needs a role", q.line, q.col)


# ---------------------------------------------------------------------------
# KB files

def parse_kb(text: str, allow_generated: bool = False) -> KnowledgeBase:
    p = _Parser(tokenize(text), allow_generated)
    sig = _Sig()
    statements = []

    while not p.at("eof"):
        t = p.peek()
        if t.kind != "ident":
            raise ParseError(f"expected a declaration or statement, found "
                             f"{t.text!r}", t.line, t.col)
        if t.text in ("concept", "arole", "crole", "individual", "dataname"):
            _parse_decl(p, sig)
        elif t.text == "datatype":
            _parse_datatype(p, sig)
        elif t.text == "axiom":
            p.next()
            statements.append(_parse_axiom(p, sig))
            p.expect(".")
        elif t.text == "assert":
            p.next()
            statements.append(_parse_assertion(p, sig))
            p.expect(".")
        else:
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)

    return KnowledgeBase(
        concepts=tuple(sig.concepts),
        aroles=tuple(sig.aroles),
        croles=tuple(sig.croles),
        individuals=tuple(sig.individuals),
        datatypes=tuple(sig.datatypes),
        statements=tuple(statements),
        datanames=tuple(sig.datanames),
    )


def _parse_decl(p: _Parser, sig: _Sig):
    tok = p.peek()
    kind = p.next().text
    if kind == "dataname" and not p.allow_generated:
        # only appears in re-parsed normalizer output
        raise ParseError("'dataname' declarations are generated, not written",
                         tok.line, tok.col)
    target = {"concept": sig.concepts, "arole": sig.aroles,
              "crole": sig.croles, "individual": sig.individuals,
              "dataname": sig.datanames}[kind]
    while True:
        tok = p.name_token()
        sig.declare(tok.text, kind, tok)
        target.append(tok.text)
        if p.at(","):
            p.next()
            continue
        break
    p.expect(".")


def _parse_datatype(p: _Parser, sig: _Sig):
    p.next()
    dtok = p.name_token()
    sig.declare(dtok.text, "datatype", dtok)
    constants: list[str] = []
    facets: list[str] = []
    p.expect("{")
    while not p.at("}"):
        t = p.peek()
        if t.kind == "ident" and t.text in ("constants", "facets"):
            p.next()
            while True:
                tok = p.name_token()
                if t.text == "constants":
                    sig.declare(tok.text, "constant", tok)
                    sig.const_dt[tok.text] = dtok.text
                    constants.append(tok.text)
                else:
                    sig.declare(tok.text, "facet", tok)
                    sig.facet_dt[tok.text] = dtok.text
                    facets.append(tok.text)
                if p.at(","):
                    p.next()
                    continue
                break
            p.expect(";")
        else:
            raise ParseError("expected 'constants' or 'facets'", t.line, t.col)
    p.expect("}")
    sig.datatypes.append(DatatypeDecl(dtok.text, tuple(constants), tuple(facets)))


def _parse_axiom(p: _Parser, sig: _Sig):
    t = p.peek()
    if t.kind == "ident" and t.text in ("ref", "irref", "sym", "asym", "tra",
                                        "fun", "dis"):
        return _parse_role_prop(p, sig)

    lhs_nodes = [p.expr()]
    while p.at(","):                      # role chain on the left of sub
        p.next()
        lhs_nodes.append(p.expr())
    op_tok = p.peek()
    if not (p.take_word("equiv") or p.take_word("sub")):
        raise ParseError("expected 'equiv' or 'sub'", op_tok.line, op_tok.col)
    op = op_tok.text
    rhs = p.expr()

    if len(lhs_nodes) > 1:
        if op != "sub":
            raise ParseError("role chains only combine with 'sub'",
                             op_tok.line, op_tok.col)
        chain = tuple(_resolve(sig, n, "arole") for n in lhs_nodes)
        return RoleChainSub(chain, _resolve(sig, rhs, "arole"))

    lhs = lhs_nodes[0]
    lq = isinstance(lhs, _Quant) and _infer_cat(sig, lhs) == "quant"
    rq = isinstance(rhs, _Quant) and _infer_cat(sig, rhs) == "quant"
    if lq and rq:
        raise ParseError("only one side of 'sub' may be quantified",
                         op_tok.line, op_tok.col)
    if lq or rq:
        if op != "sub":
            raise ParseError("quantified terms only combine with 'sub'",
                             op_tok.line, op_tok.col)
        if lq:
            q = lhs
            if q.kind == "all" or q.kind == "atmost":
                raise ParseError(f"'{q.kind}' may appear only on the right of "
                                 "'sub'", q.line, q.col)
            role, filler = _role_and_filler(sig, q)
            other = _resolve(sig, rhs, "concept")
            if q.kind == "some":
                return ExistsSub(role, filler, other)
            return MinCardSub(q.n, role, filler, other)
        q = rhs
        if q.kind == "some" or q.kind == "atleast":
            raise ParseError(f"'{q.kind}' may appear only on the left of "
                             "'sub'", q.line, q.col)
        role, filler = _role_and_filler(sig, q)
        other = _resolve(sig, lhs, "concept")
        if q.kind == "all":
            return SubAllValues(other, role, filler)
        return SubMaxCard(other, q.n, role, filler)

    lcat = _infer_cat(sig, lhs)
    rcat = _infer_cat(sig, rhs)
    if {lcat, rcat} <= {"concept"}:
        l, r = _resolve(sig, lhs, "concept"), _resolve(sig, rhs, "concept")
        return ConceptEquiv(l, r) if op == "equiv" else ConceptSub(l, r)
    if {lcat, rcat} == {"arole"}:
        l, r = _resolve(sig, lhs, "arole"), _resolve(sig, rhs, "arole")
        return RoleEquiv(l, r) if op == "equiv" else RoleSub(l, r)
    if {lcat, rcat} == {"crole"}:
        l, r = _resolve(sig, lhs, "crole"), _resolve(sig, rhs, "crole")
        return CRoleEquiv(l, r) if op == "equiv" else CRoleSub(l, r)
    if {lcat, rcat} == {"data"}:
        l, r = _resolve(sig, lhs, "data"), _resolve(sig, rhs, "data")
        return DataEquiv(l, r) if op == "equiv" else DataSub(l, r)
    raise ParseError(f"cannot relate a {lcat} term and a {rcat} term",
                     op_tok.line, op_tok.col)


def _parse_role_prop(p: _Parser, sig: _Sig):
    t = p.next()
    p.expect("(")
    first = p.expr()
    second = None
    if p.at(","):
        p.next()
        second = p.expr()
    p.expect(")")
    if t.text == "dis":
        if second is None:
            raise ParseError("dis takes two roles", t.line, t.col)
        cat = _infer_cat(sig, first)
        if cat == "arole":
            return RoleDis(_resolve(sig, first, "arole"),
                           _resolve(sig, second, "arole"))
        return CRoleDis(_resolve(sig, first, "crole"),
                        _resolve(sig, second, "crole"))
    if second is not None:
        raise ParseError(f"{t.text} takes one role", t.line, t.col)
    cat = _infer_cat(sig, first)
    if cat == "crole":
        if t.text != "fun":
            raise ParseError(f"'{t.text}' applies to abstract roles",
                             t.line, t.col)
        return CRoleProp("fun", _resolve(sig, first, "crole"))
    return RoleProp(t.text, _resolve(sig, first, "arole"))


def _parse_assertion(p: _Parser, sig: _Sig):
    if p.at("("):
        p.next()
        a = p.name_token()
        p.expect(",")
        b = p.name_token()
        p.expect(")")
        p.expect(":")
        role_node = p.expr()
        positive = True
        role_cat = _infer_cat(sig, role_node)
        ca, cb = sig.category.get(a.text), sig.category.get(b.text)
        if ca != "individual":
            raise ParseError(f"{a.text!r} is not an individual", a.line, a.col)
        if role_cat == "arole":
            if cb != "individual":
                raise ParseError(f"{b.text!r} is not an individual", b.line, b.col)
            role = _resolve(sig, role_node, "arole")
            if isinstance(role, RoleNot):
                role, positive = role.arg, False
            return RoleAssertion(a.text, b.text, role, positive)
        if role_cat == "crole":
            if cb != "constant":
                raise ParseError(f"{b.text!r} is not a constant", b.line, b.col)
            crole = _resolve(sig, role_node, "crole")
            if isinstance(crole, CRoleNot):
                crole, positive = crole.arg, False
            return CRoleAssertion(a.text, b.text, crole, positive)
        raise ParseError("pair assertion needs a role", a.line, a.col)

    subj = p.name_token()
    cat = sig.category.get(subj.text)
    if cat is None:
        raise UnknownNameError(f"undeclared name {subj.text!r}",
                               subj.line, subj.col)
    if p.at("=") or p.at("!="):
        eq = p.next().kind == "="
        other = p.name_token()
        if cat != "individual" or sig.category.get(other.text) != "individual":
            raise ParseError("equality assertions relate individuals",
                             subj.line, subj.col)
        return IndEq(subj.text, other.text, eq)
    p.expect(":")
    if cat == "individual":
        return ConceptAssertion(subj.text, _resolve(sig, p.expr(), "concept"))
    if cat == "constant":
        return ConstAssertion(subj.text, _resolve(sig, p.expr(), "data"))
    raise ParseError(f"{subj.text!r} cannot head an assertion",
                     subj.line, subj.col)


# ---------------------------------------------------------------------------
# query files

def parse_query(text: str, kb: KnowledgeBase) -> Query:
    sig = _kb_sig(kb)
    p = _Parser(tokenize(text))
    raw: list[tuple] = []
    while True:
        raw.append(_parse_query_literal(p, sig))
        if p.take_word("and"):
            continue
        break
    p.expect("eof")
    return _resolve_query(raw, sig)


def _kb_sig(kb: KnowledgeBase) -> _Sig:
    sig = _Sig()
    for n in kb.concepts:
        sig.category[n] = "concept"
        sig.concepts.append(n)
    for n in kb.aroles:
        sig.category[n] = "arole"
        sig.aroles.append(n)
    for n in kb.croles:
        sig.category[n] = "crole"
        sig.croles.append(n)
    for n in kb.individuals:
        sig.category[n] = "individual"
        sig.individuals.append(n)
    for d in kb.datatypes:
        sig.category[d.name] = "datatype"
        sig.datatypes.append(d)
        for c in d.constants:
            sig.category[c] = "constant"
            sig.const_dt[c] = d.name
        for f in d.facets:
            sig.category[f] = "facet"
            sig.facet_dt[f] = d.name
    for n in kb.datanames:
        sig.category[n] = "dataname"
        sig.datanames.append(n)
    return sig


def _parse_query_literal(p: _Parser, sig: _Sig) -> tuple:
    positive = True
    if p.take_word("not"):
        positive = False
    t = p.peek()
    if t.kind in ("ident", "var") and not p.tokens[p.i + 1].kind == "(":
        # equality literal: term (= | !=) term
        a = _query_term_token(p)
        if p.at("="):
            p.next()
        elif p.at("!="):
            p.next()
            positive = not positive
        else:
            raise ParseError("expected '=' or '!=' in equality literal",
                             t.line, t.col)
        b = _query_term_token(p)
        return ("eq", positive, a, b, t)
    if t.kind != "ident":
        raise ParseError("expected a predicate name", t.line, t.col)
    pred = p.next()
    p.expect("(")
    args = [_query_term_token(p)]
    while p.at(","):
        p.next()
        args.append(_query_term_token(p))
    p.expect(")")
    return ("pred", positive, pred, tuple(args), t)


def _query_term_token(p: _Parser) -> Token:
    t = p.peek()
    if t.kind == "var":
        return p.next()
    return p.name_token()


def _resolve_query(raw: list[tuple], sig: _Sig) -> Query:
    # sort inference: positions fix sorts; equalities propagate them
    sort: dict[str, str] = {}
    parent: dict[str, str] = {}

    def find(v: str) -> str:
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    def union(a: str, b: str):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    def set_sort(v: str, s: str, tok: Token):
        r = find(v)
        if r in sort and sort[r] != s:
            raise ParseError(f"variable ?{v} used with conflicting sorts",
                             tok.line, tok.col)
        sort[r] = s

    cons: list[tuple] = []
    for item in raw:
        if item[0] == "eq":
            _, positive, a, b, t0 = item
            for tok in (a, b):
                if tok.kind != "var":
                    c = sig.category.get(tok.text)
                    if c not in ("individual", "constant"):
                        raise ParseError(f"{tok.text!r} is not an individual "
                                         "or constant", tok.line, tok.col)
            if a.kind == "var" and b.kind == "var":
                union(a.text[1:], b.text[1:])
            cons.append(item)
        else:
            _, positive, pred, args, t0 = item
            c = sig.category.get(pred.text)
            if pred.text == "U":
                c = "arole"
            if c == "concept" and len(args) == 1:
                _term_sort(sig, args[0], "a", sort, find, set_sort)
            elif c == "datatype" and len(args) == 1:
                _term_sort(sig, args[0], "c", sort, find, set_sort)
            elif c == "arole" and len(args) == 2:
                _term_sort(sig, args[0], "a", sort, find, set_sort)
                _term_sort(sig, args[1], "a", sort, find, set_sort)
            elif c == "crole" and len(args) == 2:
                _term_sort(sig, args[0], "a", sort, find, set_sort)
                _term_sort(sig, args[1], "c", sort, find, set_sort)
            else:
                raise ParseError(f"{pred.text!r} is not a unary or binary "
                                 "predicate of matching arity",
                                 pred.line, pred.col)
            cons.append(item)

    # second pass for equalities between a variable and a named element
    for item in cons:
        if item[0] == "eq":
            _, positive, a, b, t0 = item
            for tok in (a, b):
                if tok.kind != "var":
                    s = "a" if sig.category[tok.text] == "individual" else "c"
                    for other in (a, b):
                        if other.kind == "var":
                            set_sort(other.text[1:], s, other)

    def term(tok: Token) -> QTerm:
        if tok.kind == "var":
            v = tok.text[1:]
            return QTerm("var", v, sort.get(find(v), "a"))
        c = sig.category[tok.text]
        return QTerm("ind" if c == "individual" else "const", tok.text,
                     "a" if c == "individual" else "c")

    lits: list = []
    for item in cons:
        if item[0] == "eq":
            _, positive, a, b, t0 = item
            ta, tb = term(a), term(b)
            if ta.sort != tb.sort:
                raise ParseError("equality relates terms of one sort",
                                 t0.line, t0.col)
            lits.append(QEq(ta, tb, positive))
        else:
            _, positive, pred, args, t0 = item
            c = "arole" if pred.text == "U" else sig.category[pred.text]
            if c == "concept":
                lits.append(QConcept(pred.text, term(args[0]), positive))
            elif c == "datatype":
                lits.append(QData(pred.text, term(args[0]), positive))
            elif c == "arole":
                lits.append(QRole(pred.text, term(args[0]), term(args[1]),
                                  positive))
            else:
                lits.append(QCRole(pred.text, term(args[0]), term(args[1]),
                                   positive))
    return Query(tuple(lits))


def _term_sort(sig: _Sig, tok: Token, s: str, sort, find, set_sort):
    if tok.kind == "var":
        set_sort(tok.text[1:], s, tok)
        return
    c = sig.category.get(tok.text)
    want = "individual" if s == "a" else "constant"
    if c != want:
        raise ParseError(f"{tok.text!r} is not a(n) {want}", tok.line, tok.col)
