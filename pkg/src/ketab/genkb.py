"""Seeded random knowledge bases and queries for corpus testing.

Generated texts stay inside the envelope the exhaustive oracle can
afford: few names, domains of at most four elements, cardinalities up
to two.  A cost guard rejects signatures whose exhaustive search space
would pass roughly four million interpretations, so verdict
comparisons never run into the oracle's node budget.

The same machinery with a wider profile drives the fuzz harness, where
only the pipeline itself runs and the guard can be looser.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class Profile:
    individuals: tuple[int, int] = (1, 3)
    concepts: tuple[int, int] = (1, 3)
    aroles: tuple[int, int] = (0, 2)
    croles: tuple[int, int] = (0, 1)
    datatypes: tuple[int, int] = (0, 1)
    constants: tuple[int, int] = (1, 2)
    facets: tuple[int, int] = (0, 1)
    statements: tuple[int, int] = (2, 6)
    cost_bits: int = 22              # exhaustive-search guard
    max_roles: int | None = None     # abstract and concrete together


CORPUS = Profile(max_roles=2)
FUZZ = Profile(individuals=(1, 3), concepts=(1, 4), aroles=(0, 3),
               croles=(0, 2), datatypes=(0, 2), constants=(0, 3),
               facets=(0, 2), statements=(2, 10), cost_bits=64)

CONCEPTS = ("A", "B", "C", "E")
AROLES = ("R", "S", "T")
CROLES = ("P", "Q")
INDS = ("a", "b", "c")
DTS = ("d", "d2")


@dataclass
class Signature:
    concepts: tuple[str, ...]
    aroles: tuple[str, ...]
    croles: tuple[str, ...]
    individuals: tuple[str, ...]
    datatypes: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(c for _, cs, _ in self.datatypes for c in cs)


def _pick(rng: random.Random, lo_hi: tuple[int, int]) -> int:
    return rng.randint(*lo_hi)


def _cost_bits(sig: Signature, p: Profile) -> int:
    dom = len(sig.individuals) + 1
    pool = len(sig.constants) + len(sig.datatypes) + 1
    bits = len(sig.concepts) * dom
    bits += len(sig.aroles) * dom * dom
    bits += len(sig.croles) * dom * pool
    bits += len(sig.datatypes) * pool
    for _, _, facets in sig.datatypes:
        bits += len(facets) * pool
    return bits


def random_signature(rng: random.Random, p: Profile) -> Signature:
    while True:
        n_dt = _pick(rng, p.datatypes)
        dts = []
        ci = 1
        fi = 1
        for k in range(n_dt):
            consts = tuple(f"e{ci + j}" for j in range(_pick(rng, p.constants)))
            ci += len(consts)
            facets = tuple(f"f{fi + j}" for j in range(_pick(rng, p.facets)))
            fi += len(facets)
            dts.append((DTS[k], consts, facets))
        sig = Signature(
            concepts=CONCEPTS[:_pick(rng, p.concepts)],
            aroles=AROLES[:_pick(rng, p.aroles)],
            croles=CROLES[:_pick(rng, p.croles)] if dts else (),
            individuals=INDS[:_pick(rng, p.individuals)],
            datatypes=tuple(dts),
        )
        if (p.max_roles is not None
                and len(sig.aroles) + len(sig.croles) > p.max_roles):
            continue
        if _cost_bits(sig, p) <= p.cost_bits:
            return sig


def _statement(rng: random.Random, sig: Signature) -> str | None:
    c = lambda: rng.choice(sig.concepts) if sig.concepts else None
    r = lambda: rng.choice(sig.aroles) if sig.aroles else None
    i = lambda: rng.choice(sig.individuals)
    templates = []

    if sig.concepts:
        templates += [
            lambda: f"axiom {c()} sub {c()}.",
            lambda: f"axiom {c()} and {c()} sub {c()}.",
            lambda: f"axiom {c()} sub {c()} or {c()}.",
            lambda: f"axiom {c()} sub not {c()}.",
            lambda: f"axiom top sub {c()} or {c()}.",
            lambda: f"axiom {c()} and {c()} sub bot.",
            lambda: f"axiom {c()} equiv {{{i()}}}.",
            lambda: f"axiom {{{i()}}} sub {c()}.",
            lambda: f"assert {i()} : {c()}.",
            lambda: f"assert {i()} : not {c()}.",
        ]
    if sig.concepts and sig.aroles:
        templates += [
            lambda: f"axiom some {r()} {c()} sub {c()}.",
            lambda: f"axiom {c()} sub all {r()} {c()}.",
            lambda: f"axiom atleast 2 {r()} {c()} sub {c()}.",
            lambda: f"axiom {c()} sub atmost 1 {r()} {c()}.",
            lambda: f"axiom {c()} equiv some {r()} self.",
            lambda: f"axiom {c()} equiv some {r()} {{{i()}}}.",
            lambda: f"axiom {r()} equiv {c()} prod {c()}.",
        ]
    if sig.aroles:
        templates += [
            lambda: f"axiom {rng.choice(['ref', 'irref', 'sym', 'asym', 'tra', 'fun'])}({r()}).",
            lambda: f"axiom {r()} sub {r()}.",
            lambda: f"axiom {r()} equiv inv({r()}).",
            lambda: f"axiom {r()}, {r()} sub {r()}.",
            lambda: f"assert ({i()}, {i()}) : {r()}.",
            lambda: f"assert ({i()}, {i()}) : not {r()}.",
        ]
        if len(sig.aroles) >= 2:
            a1, a2 = sig.aroles[0], sig.aroles[1]
            templates.append(lambda: f"axiom dis({a1}, {a2}).")
    if len(sig.individuals) >= 2:
        pair = lambda: rng.sample(sig.individuals, 2)
        templates += [
            lambda: "assert {} = {}.".format(*pair()),
            lambda: "assert {} != {}.".format(*pair()),
        ]
    if sig.datatypes:
        dt = lambda: rng.choice(sig.datatypes)
        templates.append(lambda: (lambda d: f"axiom {d[0]} equiv {d[0]}.")(dt()))
        withc = [d for d in sig.datatypes if d[1]]
        if withc:
            dc = lambda: rng.choice(withc)
            templates += [
                lambda: (lambda d: f"axiom {d[0]} sub {{{', '.join(d[1])}}}.")(dc()),
            ]
            if sig.croles:
                p = lambda: rng.choice(sig.croles)
                templates += [
                    lambda: (lambda d: f"assert ({i()}, {rng.choice(d[1])}) : {p()}.")(dc()),
                    lambda: (lambda d: f"assert ({i()}, {rng.choice(d[1])}) : not {p()}.")(dc()),
                    lambda: f"axiom fun({p()}).",
                ]
                if sig.concepts:
                    templates.append(
                        lambda: (lambda d: f"axiom {c()} equiv some {p()} {{{rng.choice(d[1])}}}.")(dc()))
        withf = [d for d in sig.datatypes if d[1] and d[2]]
        if withf:
            df = lambda: rng.choice(withf)
            templates += [
                lambda: (lambda d: f"assert {rng.choice(d[1])} : {rng.choice(d[2])}.")(df()),
                lambda: (lambda d: f"assert {rng.choice(d[1])} : not {rng.choice(d[2])}.")(df()),
            ]
    if not templates:
        return None
    return rng.choice(templates)()


def render_kb(rng: random.Random, sig: Signature, n_statements: int) -> str:
    lines = []
    if sig.concepts:
        lines.append("concept " + ", ".join(sig.concepts) + ".")
    if sig.aroles:
        lines.append("arole " + ", ".join(sig.aroles) + ".")
    if sig.croles:
        lines.append("crole " + ", ".join(sig.croles) + ".")
    lines.append("individual " + ", ".join(sig.individuals) + ".")
    for name, consts, facets in sig.datatypes:
        inner = []
        if consts:
            inner.append("constants " + ", ".join(consts) + ";")
        if facets:
            inner.append("facets " + ", ".join(facets) + ";")
        lines.append(f"datatype {name} {{ " + " ".join(inner) + " }")
    seen = set()
    for _ in range(n_statements):
        s = _statement(rng, sig)
        if s and s not in seen:
            seen.add(s)
            lines.append(s)
    return "\n".join(lines)


def random_kb(rng: random.Random, profile: Profile = CORPUS) -> str:
    sig = random_signature(rng, profile)
    return render_kb(rng, sig, _pick(rng, profile.statements))


def random_query(rng: random.Random, sig: Signature, max_vars: int = 2) -> str:
    """A conjunctive query over the signature, at most `max_vars`
    variables; sorts are kept consistent by using disjoint variable
    pools."""
    avars = ["?x", "?y"][:rng.randint(0, max_vars)]
    cvars = ["?u"][:max_vars - len(avars)] if sig.datatypes else []

    def aterm():
        pool = avars + list(sig.individuals)
        return rng.choice(pool)

    def cterm():
        pool = cvars + list(sig.constants)
        return rng.choice(pool) if pool else None

    lits = []
    for _ in range(rng.randint(1, 3)):
        kinds = []
        if sig.concepts:
            kinds += ["concept"] * 3
        if sig.aroles:
            kinds += ["arole"] * 3
        if sig.croles and (cvars or sig.constants):
            kinds.append("crole")
        if sig.datatypes and (cvars or sig.constants):
            kinds.append("data")
        if len(avars) + len(sig.individuals) >= 2:
            kinds.append("eq")
        if not kinds:
            continue
        k = rng.choice(kinds)
        neg = "not " if rng.random() < 0.3 else ""
        if k == "concept":
            lits.append(f"{neg}{rng.choice(sig.concepts)}({aterm()})")
        elif k == "arole":
            pred = rng.choice(sig.aroles + ("U",))
            lits.append(f"{neg}{pred}({aterm()}, {aterm()})")
        elif k == "crole":
            t = cterm()
            if t:
                lits.append(f"{neg}{rng.choice(sig.croles)}({aterm()}, {t})")
        elif k == "data":
            t = cterm()
            if t:
                lits.append(f"{neg}{rng.choice(sig.datatypes)[0]}({t})")
        else:
            x, y = aterm(), aterm()
            if x != y:
                lits.append(f"{neg}{x} = {y}")
    if not lits:
        lits = [f"{rng.choice(sig.concepts)}({aterm()})" if sig.concepts
                else f"U({aterm()}, {aterm()})"]
    return " and ".join(lits)


def corpus_pair(seed: int, profile: Profile = CORPUS):
    """Deterministic (kb text, query text) for a seed."""
    rng = random.Random(seed)
    sig = random_signature(rng, profile)
    kb = render_kb(rng, sig, _pick(rng, profile.statements))
    return kb, random_query(rng, sig)
