"""Rewriting arbitrary statements into the translator's vocabulary.

Composite terms get fresh names (prefixed `__n`) defined by equivalence
axioms, so every emitted statement mentions atoms only, one operator deep.
The rewriting is satisfiability-preserving and conservative over the
declared signature: original names keep their meaning, so consistency
and query answers are unchanged.

Forms without a direct translation reduce to ones that have it:

* `C sub D` becomes `N1 equiv not C`, `N2 equiv N1 or D`, `N2 equiv top`
* `t1 sub t2` becomes `t2 equiv t2 or t1`
* `sym(R)` becomes `N equiv inv(R)`, `N sub R`
* `asym(R)` becomes `N equiv inv(R)`, `dis(R, N)`
* `tra(R)` becomes the chain `R, R sub R`
* intersections unfold through complements: `x and y` is `not (not x or not y)`
"""

from __future__ import annotations

from . import dlmodel as dl
from .dlmodel import KnowledgeBase, Statement
from .errors import NormalizationError

GENERATED_PREFIX = "__n"


def _as_facet_expr(t):
    """View a data atom as a facet CNF of its datatype, when it is one."""
    if isinstance(t, dl.FacetExpr):
        return t
    if isinstance(t, dl.DataTop):
        return dl.FacetExpr(t.datatype, ((dl.FacetLit("top", "", True),),))
    if isinstance(t, dl.DataBottom):
        return dl.FacetExpr(t.datatype, ((dl.FacetLit("bot", "", True),),))
    return None


def _facet_or(l, r):
    """Union of two same-datatype facet CNFs, still in CNF, else None."""
    fl, fr = _as_facet_expr(l), _as_facet_expr(r)
    if fl is None or fr is None or fl.datatype != fr.datatype:
        return None
    clauses = tuple(c1 + c2 for c1 in fl.clauses for c2 in fr.clauses)
    return dl.FacetExpr(fl.datatype, clauses)


def _facet_and(l, r):
    fl, fr = _as_facet_expr(l), _as_facet_expr(r)
    if fl is None or fr is None or fl.datatype != fr.datatype:
        return None
    return dl.FacetExpr(fl.datatype, fl.clauses + fr.clauses)


def _facet_not(t):
    """Complement of a facet CNF whose shape stays CNF after negation."""
    fe = _as_facet_expr(t)
    if fe is None:
        return None
    if len(fe.clauses) == 1:
        flipped = tuple((dl.FacetLit(l.kind, l.name, not l.positive),)
                        for l in fe.clauses[0])
        return dl.FacetExpr(fe.datatype, flipped)
    if all(len(c) == 1 for c in fe.clauses):
        clause = tuple(dl.FacetLit(c[0].kind, c[0].name, not c[0].positive)
                       for c in fe.clauses)
        return dl.FacetExpr(fe.datatype, (clause,))
    return None


def _generated_floor(kb: KnowledgeBase) -> int:
    """Highest generated-name index already present in the signature."""
    floor = 0
    names = (list(kb.concepts) + list(kb.aroles) + list(kb.croles)
             + list(kb.datanames))
    for n in names:
        if n.startswith(GENERATED_PREFIX) and n[len(GENERATED_PREFIX):].isdigit():
            floor = max(floor, int(n[len(GENERATED_PREFIX):]))
    return floor


class _Normalizer:
    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.counter = _generated_floor(kb)
        self.new_concepts: list[str] = []
        self.new_aroles: list[str] = []
        self.new_croles: list[str] = []
        self.new_datanames: list[str] = []
        self.out: list[Statement] = []
        # same composite term, same fresh name
        self.cache: dict = {}

    def fresh(self) -> str:
        self.counter += 1
        return f"{GENERATED_PREFIX}{self.counter}"

    # -- fresh-name definitions (rhs is already one operator over atoms)

    def define_concept(self, rhs) -> dl.ConceptName:
        key = ("c", rhs)
        if key in self.cache:
            return self.cache[key]
        name = dl.ConceptName(self.fresh())
        self.new_concepts.append(name.name)
        self.out.append(dl.ConceptEquiv(name, rhs))
        self.cache[key] = name
        return name

    def define_role(self, rhs) -> dl.RoleName:
        key = ("r", rhs)
        if key in self.cache:
            return self.cache[key]
        name = dl.RoleName(self.fresh())
        self.new_aroles.append(name.name)
        self.out.append(dl.RoleEquiv(name, rhs))
        self.cache[key] = name
        return name

    def define_crole(self, rhs) -> dl.CRoleName:
        key = ("p", rhs)
        if key in self.cache:
            return self.cache[key]
        name = dl.CRoleName(self.fresh())
        self.new_croles.append(name.name)
        self.out.append(dl.CRoleEquiv(name, rhs))
        self.cache[key] = name
        return name

    def define_data(self, rhs) -> dl.DataName:
        key = ("d", rhs)
        if key in self.cache:
            return self.cache[key]
        name = dl.DataName(self.fresh())
        self.new_datanames.append(name.name)
        self.out.append(dl.DataEquiv(name, rhs))
        self.cache[key] = name
        return name

    # -- naming: term of any depth to an atom

    def concept_atom(self, c):
        if dl.is_concept_atom(c):
            return c
        if isinstance(c, dl.ConceptNot):
            return self.define_concept(dl.ConceptNot(self.concept_atom(c.arg)))
        if isinstance(c, dl.ConceptOr):
            return self.define_concept(
                dl.ConceptOr(self.concept_atom(c.left),
                             self.concept_atom(c.right)))
        if isinstance(c, dl.ConceptAnd):
            nl = self.define_concept(dl.ConceptNot(self.concept_atom(c.left)))
            nr = self.define_concept(dl.ConceptNot(self.concept_atom(c.right)))
            u = self.define_concept(dl.ConceptOr(nl, nr))
            return self.define_concept(dl.ConceptNot(u))
        if isinstance(c, dl.SelfConcept):
            return self.define_concept(dl.SelfConcept(self.role_atom(c.role)))
        if isinstance(c, dl.ValueConcept):
            return self.define_concept(
                dl.ValueConcept(self.role_atom(c.role), c.individual))
        if isinstance(c, dl.DataValueConcept):
            return self.define_concept(
                dl.DataValueConcept(self.crole_atom(c.crole), c.constant))
        raise NormalizationError(f"unknown concept term {c!r}")

    def role_atom(self, r):
        if dl.is_role_atom(r):
            return r
        if isinstance(r, dl.RoleInv):
            return self.define_role(dl.RoleInv(self.role_atom(r.arg)))
        if isinstance(r, dl.RoleNot):
            return self.define_role(dl.RoleNot(self.role_atom(r.arg)))
        if isinstance(r, dl.RoleOr):
            return self.define_role(
                dl.RoleOr(self.role_atom(r.left), self.role_atom(r.right)))
        if isinstance(r, dl.RoleAnd):
            nl = self.define_role(dl.RoleNot(self.role_atom(r.left)))
            nr = self.define_role(dl.RoleNot(self.role_atom(r.right)))
            u = self.define_role(dl.RoleOr(nl, nr))
            return self.define_role(dl.RoleNot(u))
        if isinstance(r, dl.RoleDomRestr):
            return self.define_role(
                dl.RoleDomRestr(self.role_atom(r.role),
                                self.concept_atom(r.concept)))
        if isinstance(r, dl.RoleRanRestr):
            return self.define_role(
                dl.RoleRanRestr(self.role_atom(r.role),
                                self.concept_atom(r.concept)))
        if isinstance(r, dl.RoleRestr):
            return self.define_role(
                dl.RoleRestr(self.role_atom(r.role),
                             self.concept_atom(r.dom),
                             self.concept_atom(r.ran)))
        if isinstance(r, dl.RoleId):
            return self.define_role(dl.RoleId(self.concept_atom(r.concept)))
        if isinstance(r, dl.RoleProd):
            return self.define_role(
                dl.RoleProd(self.concept_atom(r.dom),
                            self.concept_atom(r.ran)))
        raise NormalizationError(f"unknown role term {r!r}")

    def crole_atom(self, p):
        if dl.is_crole_atom(p):
            return p
        if isinstance(p, dl.CRoleNot):
            return self.define_crole(dl.CRoleNot(self.crole_atom(p.arg)))
        if isinstance(p, dl.CRoleOr):
            return self.define_crole(
                dl.CRoleOr(self.crole_atom(p.left), self.crole_atom(p.right)))
        if isinstance(p, dl.CRoleAnd):
            nl = self.define_crole(dl.CRoleNot(self.crole_atom(p.left)))
            nr = self.define_crole(dl.CRoleNot(self.crole_atom(p.right)))
            u = self.define_crole(dl.CRoleOr(nl, nr))
            return self.define_crole(dl.CRoleNot(u))
        if isinstance(p, dl.CRoleDomRestr):
            return self.define_crole(
                dl.CRoleDomRestr(self.crole_atom(p.crole),
                                 self.concept_atom(p.concept)))
        if isinstance(p, dl.CRoleRanRestr):
            return self.define_crole(
                dl.CRoleRanRestr(self.crole_atom(p.crole),
                                 self.data_atom(p.data)))
        if isinstance(p, dl.CRoleRestr):
            return self.define_crole(
                dl.CRoleRestr(self.crole_atom(p.crole),
                              self.concept_atom(p.dom),
                              self.data_atom(p.ran)))
        raise NormalizationError(f"unknown concrete role term {p!r}")

    def data_atom(self, t):
        if dl.is_data_atom(t):
            return t
        shallow = self.shallow_data(t)
        if dl.is_data_atom(shallow):
            return shallow
        return self.define_data(shallow)

    # -- shallow rewriting: keep the top operator, atomize its arguments

    def shallow_concept(self, c):
        if dl.is_concept_atom(c):
            return c
        if isinstance(c, dl.ConceptNot):
            return dl.ConceptNot(self.concept_atom(c.arg))
        if isinstance(c, dl.ConceptOr):
            return dl.ConceptOr(self.concept_atom(c.left),
                                self.concept_atom(c.right))
        if isinstance(c, dl.ConceptAnd):
            # x and y unfolds to not (not x or not y); the final complement
            # stays at the top so no name is spent on it
            nl = self.define_concept(dl.ConceptNot(self.concept_atom(c.left)))
            nr = self.define_concept(dl.ConceptNot(self.concept_atom(c.right)))
            return dl.ConceptNot(self.define_concept(dl.ConceptOr(nl, nr)))
        if isinstance(c, dl.SelfConcept):
            return dl.SelfConcept(self.role_atom(c.role))
        if isinstance(c, dl.ValueConcept):
            return dl.ValueConcept(self.role_atom(c.role), c.individual)
        if isinstance(c, dl.DataValueConcept):
            return dl.DataValueConcept(self.crole_atom(c.crole), c.constant)
        raise NormalizationError(f"unknown concept term {c!r}")

    def shallow_role(self, r):
        if dl.is_role_atom(r):
            return r
        if isinstance(r, dl.RoleInv):
            return dl.RoleInv(self.role_atom(r.arg))
        if isinstance(r, dl.RoleNot):
            return dl.RoleNot(self.role_atom(r.arg))
        if isinstance(r, dl.RoleOr):
            return dl.RoleOr(self.role_atom(r.left), self.role_atom(r.right))
        if isinstance(r, dl.RoleAnd):
            nl = self.define_role(dl.RoleNot(self.role_atom(r.left)))
            nr = self.define_role(dl.RoleNot(self.role_atom(r.right)))
            return dl.RoleNot(self.define_role(dl.RoleOr(nl, nr)))
        if isinstance(r, dl.RoleDomRestr):
            return dl.RoleDomRestr(self.role_atom(r.role),
                                   self.concept_atom(r.concept))
        if isinstance(r, dl.RoleRanRestr):
            return dl.RoleRanRestr(self.role_atom(r.role),
                                   self.concept_atom(r.concept))
        if isinstance(r, dl.RoleRestr):
            return dl.RoleRestr(self.role_atom(r.role),
                                self.concept_atom(r.dom),
                                self.concept_atom(r.ran))
        if isinstance(r, dl.RoleId):
            return dl.RoleId(self.concept_atom(r.concept))
        if isinstance(r, dl.RoleProd):
            return dl.RoleProd(self.concept_atom(r.dom),
                               self.concept_atom(r.ran))
        raise NormalizationError(f"unknown role term {r!r}")

    def shallow_crole(self, p):
        if dl.is_crole_atom(p):
            return p
        if isinstance(p, dl.CRoleNot):
            return dl.CRoleNot(self.crole_atom(p.arg))
        if isinstance(p, dl.CRoleOr):
            return dl.CRoleOr(self.crole_atom(p.left), self.crole_atom(p.right))
        if isinstance(p, dl.CRoleAnd):
            nl = self.define_crole(dl.CRoleNot(self.crole_atom(p.left)))
            nr = self.define_crole(dl.CRoleNot(self.crole_atom(p.right)))
            return dl.CRoleNot(self.define_crole(dl.CRoleOr(nl, nr)))
        if isinstance(p, dl.CRoleDomRestr):
            return dl.CRoleDomRestr(self.crole_atom(p.crole),
                                    self.concept_atom(p.concept))
        if isinstance(p, dl.CRoleRanRestr):
            return dl.CRoleRanRestr(self.crole_atom(p.crole),
                                    self.data_atom(p.data))
        if isinstance(p, dl.CRoleRestr):
            return dl.CRoleRestr(self.crole_atom(p.crole),
                                 self.concept_atom(p.dom),
                                 self.data_atom(p.ran))
        raise NormalizationError(f"unknown concrete role term {p!r}")

    def shallow_data(self, t):
        if dl.is_data_atom(t):
            return t
        if isinstance(t, dl.DataNot):
            arg = self.data_atom(t.arg)
            merged = _facet_not(arg)
            return merged if merged is not None else dl.DataNot(arg)
        if isinstance(t, dl.DataOr):
            l, r = self.data_atom(t.left), self.data_atom(t.right)
            merged = _facet_or(l, r)
            return merged if merged is not None else dl.DataOr(l, r)
        if isinstance(t, dl.DataAnd):
            l, r = self.data_atom(t.left), self.data_atom(t.right)
            merged = _facet_and(l, r)
            return merged if merged is not None else dl.DataAnd(l, r)
        raise NormalizationError(f"unknown data term {t!r}")

    # -- abstract/concrete dispatch for quantified statements

    def any_role_atom(self, role):
        if isinstance(role, dl.ROLE_TERM_TYPES):
            return self.role_atom(role)
        return self.crole_atom(role)

    def filler_atom(self, filler):
        if isinstance(filler, dl.CONCEPT_TERM_TYPES):
            return self.concept_atom(filler)
        return self.data_atom(filler)

    # -- statements

    def statement(self, stmt: Statement):
        if dl.is_normalized(stmt):
            self.out.append(stmt)
            return

        if isinstance(stmt, dl.ConceptEquiv):
            lhs = self.concept_atom(stmt.lhs)
            rhs = self.shallow_concept(stmt.rhs)
            if not isinstance(lhs, dl.ConceptName):
                if isinstance(rhs, dl.ConceptName):
                    lhs, rhs = rhs, lhs
                else:
                    n = self.define_concept(lhs)
                    lhs = n
            self.out.append(dl.ConceptEquiv(lhs, rhs))
            return

        if isinstance(stmt, dl.ConceptSub):
            lhs = self.concept_atom(stmt.lhs)
            rhs = self.concept_atom(stmt.rhs)
            n1 = self.define_concept(dl.ConceptNot(lhs))
            n2 = self.define_concept(dl.ConceptOr(n1, rhs))
            self.out.append(dl.ConceptEquiv(n2, dl.Top()))
            return

        if isinstance(stmt, dl.SubAllValues):
            self.out.append(dl.SubAllValues(self.concept_atom(stmt.lhs),
                                            self.any_role_atom(stmt.role),
                                            self.filler_atom(stmt.filler)))
            return
        if isinstance(stmt, dl.ExistsSub):
            self.out.append(dl.ExistsSub(self.any_role_atom(stmt.role),
                                         self.filler_atom(stmt.filler),
                                         self.concept_atom(stmt.rhs)))
            return
        if isinstance(stmt, dl.MinCardSub):
            self.out.append(dl.MinCardSub(stmt.n,
                                          self.any_role_atom(stmt.role),
                                          self.filler_atom(stmt.filler),
                                          self.concept_atom(stmt.rhs)))
            return
        if isinstance(stmt, dl.SubMaxCard):
            self.out.append(dl.SubMaxCard(self.concept_atom(stmt.lhs), stmt.n,
                                          self.any_role_atom(stmt.role),
                                          self.filler_atom(stmt.filler)))
            return

        if isinstance(stmt, dl.RoleEquiv):
            lhs = self.role_atom(stmt.lhs)
            rhs = self.shallow_role(stmt.rhs)
            if not isinstance(lhs, dl.RoleName):
                if isinstance(rhs, dl.RoleName):
                    lhs, rhs = rhs, lhs
                else:
                    lhs = self.define_role(lhs)
            self.out.append(dl.RoleEquiv(lhs, rhs))
            return

        if isinstance(stmt, dl.RoleSub):
            self.out.append(dl.RoleSub(self.role_atom(stmt.lhs),
                                       self.role_atom(stmt.rhs)))
            return

        if isinstance(stmt, dl.RoleChainSub):
            chain = tuple(self._chain_link(r) for r in stmt.chain)
            self.out.append(dl.RoleChainSub(chain, self._chain_link(stmt.rhs)))
            return

        if isinstance(stmt, dl.RoleProp):
            r = self.role_atom(stmt.role)
            if stmt.kind in ("ref", "irref", "fun"):
                self.out.append(dl.RoleProp(stmt.kind, r))
            elif stmt.kind == "sym":
                n = self.define_role(dl.RoleInv(r))
                self.out.append(dl.RoleSub(n, r))
            elif stmt.kind == "asym":
                n = self.define_role(dl.RoleInv(r))
                self.out.append(dl.RoleDis(r, n))
            elif stmt.kind == "tra":
                self.out.append(dl.RoleChainSub(
                    (self._chain_link(r), self._chain_link(r)),
                    self._chain_link(r)))
            else:
                raise NormalizationError(f"unknown role property {stmt.kind!r}")
            return

        if isinstance(stmt, dl.RoleDis):
            self.out.append(dl.RoleDis(self.role_atom(stmt.r1),
                                       self.role_atom(stmt.r2)))
            return

        if isinstance(stmt, dl.CRoleEquiv):
            lhs = self.crole_atom(stmt.lhs)
            rhs = self.shallow_crole(stmt.rhs)
            if not isinstance(lhs, dl.CRoleName):
                raise NormalizationError(f"bad concrete role lhs {lhs!r}")
            self.out.append(dl.CRoleEquiv(lhs, rhs))
            return

        if isinstance(stmt, dl.CRoleSub):
            self.out.append(dl.CRoleSub(self.crole_atom(stmt.lhs),
                                        self.crole_atom(stmt.rhs)))
            return

        if isinstance(stmt, dl.CRoleProp):
            self.out.append(dl.CRoleProp(stmt.kind,
                                         self.crole_atom(stmt.crole)))
            return

        if isinstance(stmt, dl.CRoleDis):
            self.out.append(dl.CRoleDis(self.crole_atom(stmt.p1),
                                        self.crole_atom(stmt.p2)))
            return

        if isinstance(stmt, dl.DataEquiv):
            self.out.append(dl.DataEquiv(self.data_atom(stmt.lhs),
                                         self.shallow_data(stmt.rhs)))
            return

        if isinstance(stmt, dl.DataSub):
            # t1 sub t2 holds exactly when t2 = t2 or t1
            lhs = self.data_atom(stmt.lhs)
            rhs = self.data_atom(stmt.rhs)
            union = _facet_or(rhs, lhs)
            if union is None:
                union = dl.DataOr(rhs, lhs)
            self.out.append(dl.DataEquiv(rhs, union))
            return

        if isinstance(stmt, dl.ConceptAssertion):
            self.out.append(dl.ConceptAssertion(stmt.individual,
                                                self.concept_atom(stmt.concept)))
            return
        if isinstance(stmt, dl.RoleAssertion):
            role = self.role_atom(stmt.role)
            self.out.append(dl.RoleAssertion(stmt.a, stmt.b, role,
                                             stmt.positive))
            return
        if isinstance(stmt, dl.ConstAssertion):
            self.out.append(dl.ConstAssertion(stmt.constant,
                                              self.data_atom(stmt.data)))
            return
        if isinstance(stmt, dl.CRoleAssertion):
            self.out.append(dl.CRoleAssertion(stmt.individual, stmt.constant,
                                              self.crole_atom(stmt.crole),
                                              stmt.positive))
            return

        raise NormalizationError(f"cannot normalize {stmt!r}")

    def _chain_link(self, r) -> dl.RoleName:
        atom = self.role_atom(r)
        if isinstance(atom, dl.UniversalRole):
            # chains and their targets need plain names
            return self.define_role(dl.UniversalRole())
        return atom


def normalize_kb(kb: KnowledgeBase) -> KnowledgeBase:
    """Equisatisfiable KB whose statements all translate directly."""
    n = _Normalizer(kb)
    for stmt in kb.statements:
        n.statement(stmt)
    out = KnowledgeBase(
        concepts=kb.concepts + tuple(n.new_concepts),
        aroles=kb.aroles + tuple(n.new_aroles),
        croles=kb.croles + tuple(n.new_croles),
        individuals=kb.individuals,
        datatypes=kb.datatypes,
        statements=tuple(n.out),
        datanames=kb.datanames + tuple(n.new_datanames),
    )
    for stmt in out.statements:
        if not dl.is_normalized(stmt):
            raise NormalizationError(f"normalization left {stmt!r}")
    return out
