"""Saturation of ground clause sets by a two-rule tableau.

A branch carries a literal store, element classes driven by positive
equality literals, and per-clause fulfillment flags.  The elimination
rule adds the last undecided literal of a clause whose other literals
are all false on the branch; the split rule bisects on an undecided
literal of an unfulfilled clause and only fires when no elimination
step applies anywhere on the branch.  A branch closes on a
complementary pair, a falsified inequality, or a clause with every
literal false.

Literals are compared modulo the branch's element classes: stored
literals are kept rewritten to class representatives, and a merge
rewrites the whole store.  That makes equality of identified elements
effective without a separate substitution rule.

Runs can record a trace of rule applications; `audit_trace` replays one
and verifies every rule's precondition, in particular that no split
happened while an elimination was available.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import AuditError, BudgetError, IncompleteBranchError
from .formulas import EqAtom, Lit, MemRel, MemSet, RelVar, SetVar, lit_sexpr
from .ground import GroundProblem


class Branch:
    """One branch: literal store, element classes, fulfillment flags."""

    __slots__ = ("problem", "lits", "parent", "size", "fulfilled",
                 "closed", "closed_reason", "depth", "_sid")

    def __init__(self, problem: GroundProblem):
        n = len(problem.elems)
        self.problem = problem
        self.lits: set[int] = set()
        self.parent = list(range(n))
        self.size = [1] * n
        self.fulfilled = bytearray(len(problem.clauses))
        self.closed = False
        self.closed_reason: tuple | None = None
        self.depth = 0              # literals this branch was extended by
        self._sid = 0               # identity partition

    def clone(self) -> "Branch":
        b = Branch.__new__(Branch)
        b.problem = self.problem
        b.lits = set(self.lits)
        b.parent = self.parent.copy()
        b.size = self.size.copy()
        b.fulfilled = bytearray(self.fulfilled)
        b.closed = self.closed
        b.closed_reason = self.closed_reason
        b.depth = self.depth
        b._sid = self._sid
        return b

    # -- element classes

    def _find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def rep(self, v):
        """Class representative of an element variable."""
        return self.problem.elems[self._find(self.problem.elem_ids[v])]

    def canon(self, code: int):
        """Literal rewritten to representatives; True/False when the
        element classes already decide an equality.

        Results are memoized per partition state, shared by every
        branch of the problem that reaches the same identifications.
        """
        cache = self.problem.canon_cache
        key = (self._sid, code)
        v = cache.get(key)
        if v is None:
            v = self._canon_compute(code)
            cache[key] = v
        return v

    def _canon_compute(self, code: int):
        atom = self.problem.atoms[abs(code) - 1]
        positive = code > 0
        if isinstance(atom, EqAtom):
            a, b = self.rep(atom.a), self.rep(atom.b)
            if a == b:
                return positive
            atom = EqAtom(a, b)
        elif isinstance(atom, MemSet):
            atom = MemSet(self.rep(atom.x), atom.s)
        else:
            atom = MemRel(self.rep(atom.x), self.rep(atom.y), atom.r)
        i = self.problem.atom_id(atom) + 1
        return i if positive else -i

    def status(self, code: int):
        """True, False, or None when the branch does not decide it."""
        c = self.canon(code)
        if isinstance(c, bool):
            return c
        if c in self.lits:
            return True
        if -c in self.lits:
            return False
        return None

    # -- extending the branch

    def add(self, code: int) -> bool:
        """Record a literal; False when the branch closes on it."""
        if self.closed:
            return False
        c = self.canon(code)
        if c is True:
            return True
        if c is False:
            self._close(("neq", lit_sexpr(self.problem.decode_lit(code))))
            return False
        if c in self.lits:
            return True
        if -c in self.lits:
            self._close(("complement", lit_sexpr(self.problem.decode_lit(c))))
            return False
        self.depth += 1
        atom = self.problem.atoms[c - 1] if c > 0 else None
        if atom is not None and isinstance(atom, EqAtom):
            self._merge(atom.a, atom.b)
            return not self.closed
        self.lits.add(c)
        return True

    def _merge(self, a, b) -> None:
        ia = self._find(self.problem.elem_ids[a])
        ib = self._find(self.problem.elem_ids[b])
        if self.size[ia] < self.size[ib]:
            ia, ib = ib, ia
        self.parent[ib] = ia
        self.size[ia] += self.size[ib]
        self._sid = self.problem.state_id(
            tuple(self._find(i) for i in range(len(self.parent))))
        # rewrite the store; identification can surface a contradiction.
        # scan everything and close on the smallest offender so the
        # reason does not depend on set iteration order
        old = self.lits
        self.lits = set()
        neq = None
        comp = None
        for code in old:
            c = self.canon(code)
            if c is True:
                continue
            if c is False:
                if neq is None or abs(code) < abs(neq):
                    neq = code
                continue
            if -c in self.lits and (comp is None or abs(c) < comp):
                comp = abs(c)
            self.lits.add(c)
        if neq is not None:
            self._close(("neq", lit_sexpr(self.problem.decode_lit(neq))))
        elif comp is not None:
            self._close(("complement",
                         lit_sexpr(self.problem.decode_lit(comp))))

    def _close(self, reason: tuple) -> None:
        self.closed = True
        self.closed_reason = reason


def clause_state(branch: Branch, clause: tuple[int, ...]):
    """('sat', None), ('closed', None), ('unit', code), or
    ('open', codes) with the undecided literals, one per class."""
    undecided: dict[int, int] = {}
    for code in clause:
        c = branch.canon(code)
        if c is True:
            return ("sat", None)
        if c is False:
            continue
        if c in branch.lits:
            return ("sat", None)
        if -c in branch.lits:
            continue
        undecided.setdefault(c, code)
    if not undecided:
        return ("closed", None)
    codes = tuple(undecided.values())
    if len(codes) == 1:
        return ("unit", codes[0])
    return ("open", codes)


def _saturate_branch(b: Branch, trace, bid: int):
    """Eliminations to a fixpoint.  ('closed',), ('open',), or
    ('split', clause_index, code)."""
    clauses = b.problem.clauses
    while True:
        fired = False
        first_split = None
        for ci, cl in enumerate(clauses):
            if b.fulfilled[ci]:
                continue
            st, payload = clause_state(b, cl)
            if st == "sat":
                b.fulfilled[ci] = 1
            elif st == "closed":
                b._close(("empty", ci))
                if trace is not None:
                    trace.append(("close", bid, "empty", ci))
                return ("closed",)
            elif st == "unit":
                if trace is not None:
                    trace.append(("e", bid, ci, payload))
                if not b.add(payload):
                    if trace is not None:
                        trace.append(("close", bid) + b.closed_reason)
                    return ("closed",)
                b.fulfilled[ci] = 1
                fired = True
            elif first_split is None:
                first_split = (ci, payload[0])
        if not fired:
            if first_split is None:
                if trace is not None:
                    trace.append(("open", bid))
                return ("open",)
            return ("split", *first_split)


@dataclass
class TableauResult:
    consistent: bool
    open_branches: list[Branch]
    closed_branches: int
    branches_total: int
    complete: bool                  # False when a sat-mode run stopped early
    trace: list[tuple] | None
    depth: int = 0                  # longest branch, counted in literals


class _SearchState:
    def __init__(self, problem: GroundProblem, mode: str, trace,
                 max_branches):
        self.problem = problem
        self.mode = mode
        self.trace = trace
        self.max_branches = max_branches
        self.cv = threading.Condition()
        self.stack: list[tuple[int, Branch]] = [(0, Branch(problem))]
        self.pending = 1            # branches popped or waiting, not yet leaves
        self.next_id = 1
        self.stop = False
        self.open: list[Branch] = []
        self.closed = 0
        self.depth = 0
        self.error: BudgetError | None = None


def _worker(st: _SearchState) -> None:
    while True:
        with st.cv:
            while not st.stack and st.pending and not st.stop:
                st.cv.wait()
            if st.stop or not st.pending:
                st.cv.notify_all()
                return
            bid, b = st.stack.pop()
        if b.closed:
            # closed when its split literal was added; event already out
            with st.cv:
                st.closed += 1
                st.pending -= 1
                st.depth = max(st.depth, b.depth)
                st.cv.notify_all()
            continue
        res = _saturate_branch(b, st.trace, bid)
        if res[0] == "closed":
            with st.cv:
                st.closed += 1
                st.pending -= 1
                st.depth = max(st.depth, b.depth)
                st.cv.notify_all()
        elif res[0] == "open":
            with st.cv:
                st.open.append(b)
                st.pending -= 1
                st.depth = max(st.depth, b.depth)
                if st.mode == "sat":
                    st.stop = True
                st.cv.notify_all()
        else:
            _, ci, code = res
            t = b.clone()
            with st.cv:
                if (st.max_branches is not None
                        and st.next_id + 2 > st.max_branches):
                    st.error = BudgetError(
                        f"tableau would exceed the branch budget "
                        f"of {st.max_branches}")
                    st.stop = True
                    st.cv.notify_all()
                    return
                tid, fid = st.next_id, st.next_id + 1
                st.next_id += 2
                if st.trace is not None:
                    st.trace.append(("pb", bid, ci, code, tid, fid))
            okt = t.add(code)
            okf = b.add(-code)
            with st.cv:
                if st.trace is not None:
                    if not okt:
                        st.trace.append(("close", tid) + t.closed_reason)
                    if not okf:
                        st.trace.append(("close", fid) + b.closed_reason)
                st.stack.append((fid, b))
                st.stack.append((tid, t))
                st.pending += 1
                st.cv.notify_all()


def saturate(problem: GroundProblem, mode: str = "sat",
             record_trace: bool = False, threads: int = 1,
             max_branches: int | None = None) -> TableauResult:
    """Explore the tableau for a ground problem.

    mode 'sat' stops at the first open saturated branch; mode 'all'
    explores every branch.  Trace recording forces a single worker so
    event order is reproducible.  A branch budget aborts the run with
    BudgetError once the tree would grow past it.
    """
    if mode not in ("sat", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    if record_trace:
        threads = 1
    st = _SearchState(problem, mode, [] if record_trace else None,
                      max_branches)
    if threads <= 1:
        _worker(st)
    else:
        workers = [threading.Thread(target=_worker, args=(st,))
                   for _ in range(threads)]
        for w in workers:
            w.start()
        for w in workers:
            w.join()
    if st.error is not None:
        raise st.error
    return TableauResult(
        consistent=bool(st.open),
        open_branches=st.open,
        closed_branches=st.closed,
        branches_total=st.next_id,
        complete=st.pending == 0,
        trace=st.trace,
        depth=st.depth,
    )


# ---------------------------------------------------------------------------
# trace auditing

class _AuditBranch:
    """Replayed branch plus per-clause true/false literal counts.

    Since clauses are deduplicated and free of trivial equalities,
    canon is the identity until the branch merges element classes, and
    the split and leaf preconditions reduce to three running counters.
    A merge rebuilds the counters, and a branch-local index over the
    rewritten clause literals, in one pass; clones share the index
    until their next merge.
    """

    __slots__ = ("b", "merged", "index", "widths", "ntrue", "nfalse",
                 "n_unit", "n_falsified", "n_unsat")

    def __init__(self, b: Branch, index, widths):
        self.b = b
        self.merged = False
        self.index = index
        self.widths = widths
        self.ntrue = bytearray(len(widths))
        self.nfalse = bytearray(len(widths))
        self.n_unit = sum(1 for w in widths if w == 1)
        self.n_falsified = sum(1 for w in widths if w == 0)
        self.n_unsat = len(widths)

    def clone(self) -> "_AuditBranch":
        other = object.__new__(_AuditBranch)
        other.b = self.b.clone()
        other.merged = self.merged
        other.index = self.index
        other.widths = self.widths
        other.ntrue = bytearray(self.ntrue)
        other.nfalse = bytearray(self.nfalse)
        other.n_unit = self.n_unit
        other.n_falsified = self.n_falsified
        other.n_unsat = self.n_unsat
        return other

    def rebuild(self) -> None:
        """Recompute counters over the rewritten clause set."""
        b = self.b
        lits = b.lits
        clauses = b.problem.clauses
        index: dict[int, list[tuple[int, int]]] = {}
        self.widths = widths = bytearray(len(clauses))
        self.ntrue = ntrue = bytearray(len(clauses))
        self.nfalse = nfalse = bytearray(len(clauses))
        n_unit = n_falsified = n_unsat = 0
        for ci, cl in enumerate(clauses):
            sat = False
            codes: set[int] = set()
            for code in cl:
                c = b.canon(code)
                if c is True or -c in codes:
                    sat = True
                    break
                if c is not False:
                    codes.add(c)
            if sat:
                ntrue[ci] = 1
                continue
            nt = nf = 0
            for c in codes:
                if c in lits:
                    nt += 1
                elif -c in lits:
                    nf += 1
                else:
                    index.setdefault(abs(c), []).append((ci, c))
            w = len(codes)
            widths[ci], ntrue[ci], nfalse[ci] = w, nt, nf
            if nt == 0:
                n_unsat += 1
                n_unit += w - nf == 1
                n_falsified += nf == w
        self.index = index
        self.n_unit, self.n_falsified = n_unit, n_falsified
        self.n_unsat = n_unsat

    def add(self, code: int) -> None:
        b = self.b
        if b.closed:
            return
        c = b.canon(code) if self.merged else code
        if isinstance(c, bool):
            b.add(code)
            return
        if c > 0 and isinstance(b.problem.atoms[c - 1], EqAtom):
            b.add(code)
            if not b.closed:
                self.merged = True
                self.rebuild()
            return
        if c in b.lits or -c in b.lits:
            b.add(code)
            return
        if b.add(code):
            for ci, stored in self.index.get(abs(c), ()):
                w = self.widths[ci]
                nt, nf = self.ntrue[ci], self.nfalse[ci]
                if nt == 0:
                    self.n_unit -= w - nf == 1
                    self.n_falsified -= nf == w
                    self.n_unsat -= 1
                if stored == c:
                    nt += 1
                    self.ntrue[ci] = nt
                else:
                    nf += 1
                    self.nfalse[ci] = nf
                if nt == 0:
                    self.n_unit += w - nf == 1
                    self.n_falsified += nf == w
                    self.n_unsat += 1


def audit_trace(problem: GroundProblem, trace: list[tuple]) -> int:
    """Replay a trace, checking every rule precondition.

    Raises AuditError on the first violation; returns the number of
    events checked.  The key property: a split event is only legal when
    no clause on its branch admits an elimination or is falsified.
    """
    widths = bytearray(len(cl) for cl in problem.clauses)
    index: dict[int, list[tuple[int, int]]] = {}
    for ci, cl in enumerate(problem.clauses):
        for code in cl:
            index.setdefault(abs(code), []).append((ci, code))

    def scan_split(ab: _AuditBranch) -> None:
        if not ab.n_unit and not ab.n_falsified:
            return
        for cj, cl in enumerate(problem.clauses):
            st, _ = clause_state(ab.b, cl)
            if st == "unit":
                raise AuditError(
                    f"split while clause {cj} admits an elimination")
            if st == "closed":
                raise AuditError(
                    f"split while clause {cj} is falsified")

    branches: dict[int, _AuditBranch] = {
        0: _AuditBranch(Branch(problem), index, widths)}
    for ev in trace:
        kind = ev[0]
        if kind == "e":
            _, bid, ci, code = ev
            ab = branches[bid]
            b = ab.b
            if b.closed:
                raise AuditError(f"elimination on closed branch {bid}")
            clause = problem.clauses[ci]
            if code not in clause:
                raise AuditError(f"literal {code} not in clause {ci}")
            st, payload = clause_state(b, clause)
            if st != "unit":
                raise AuditError(
                    f"elimination on clause {ci} in state {st!r}")
            if b.canon(payload) != b.canon(code):
                raise AuditError(f"clause {ci} eliminates to a different "
                                 f"literal than {code}")
            ab.add(code)
        elif kind == "pb":
            _, bid, ci, code, tid, fid = ev
            ab = branches[bid]
            b = ab.b
            if b.closed:
                raise AuditError(f"split on closed branch {bid}")
            scan_split(ab)
            st, _ = clause_state(b, problem.clauses[ci])
            if st != "open":
                raise AuditError(f"split on clause {ci} in state {st!r}")
            if code not in problem.clauses[ci]:
                raise AuditError(f"split literal {code} not in clause {ci}")
            if b.status(code) is not None:
                raise AuditError(f"split on decided literal {code}")
            t, f = ab.clone(), ab
            del branches[bid]
            t.add(code)
            f.add(-code)
            branches[tid], branches[fid] = t, f
        elif kind == "close":
            _, bid, ckind, detail = ev
            b = branches[bid].b
            if b.closed:
                if b.closed_reason != (ckind, detail):
                    raise AuditError(
                        f"close reason mismatch on branch {bid}: "
                        f"{(ckind, detail)!r} vs {b.closed_reason!r}")
            elif ckind == "empty":
                st, _ = clause_state(b, problem.clauses[detail])
                if st != "closed":
                    raise AuditError(
                        f"close event but clause {detail} is not falsified")
                b._close((ckind, detail))
            else:
                raise AuditError(f"close event on open branch {bid}")
            del branches[bid]
        elif kind == "open":
            _, bid = ev
            ab = branches.pop(bid)
            if ab.b.closed:
                raise AuditError(f"open event on closed branch {bid}")
            if ab.n_unsat:
                for cj, cl in enumerate(problem.clauses):
                    st, _ = clause_state(ab.b, cl)
                    if st != "sat":
                        raise AuditError(
                            f"open branch {bid} leaves clause {cj} "
                            f"unsatisfied")
        else:
            raise AuditError(f"unknown event kind {kind!r}")
    return len(trace)


# ---------------------------------------------------------------------------
# models from open branches

@dataclass
class BranchModel:
    """Interpretation read off an open saturated branch: elements are
    class representatives, memberships are the positive literals."""
    rep_of: dict
    sets: dict[SetVar, frozenset]
    rels: dict[RelVar, frozenset]

    @property
    def domain(self) -> tuple:
        seen: dict = {}
        for r in self.rep_of.values():
            seen.setdefault(r, None)
        return tuple(seen)


def extract_model(problem: GroundProblem, branch: Branch) -> BranchModel:
    if branch.closed:
        raise IncompleteBranchError("cannot read a model off a closed branch")
    for ci, cl in enumerate(problem.clauses):
        if clause_state(branch, cl)[0] != "sat":
            raise IncompleteBranchError(
                f"branch is not saturated: clause {ci} undecided")
    rep_of = {e: problem.elems[branch._find(i)]
              for e, i in problem.elem_ids.items()}
    sets: dict[SetVar, set] = {}
    rels: dict[RelVar, set] = {}
    for code in branch.lits:
        if code < 0:
            continue
        atom = problem.atoms[code - 1]
        if isinstance(atom, MemSet):
            sets.setdefault(atom.s, set()).add(atom.x)
        elif isinstance(atom, MemRel):
            rels.setdefault(atom.r, set()).add((atom.x, atom.y))
    return BranchModel(
        rep_of=rep_of,
        sets={s: frozenset(v) for s, v in sets.items()},
        rels={r: frozenset(v) for r, v in rels.items()},
    )


def lit_true_in_model(model: BranchModel, lit: Lit) -> bool:
    atom = lit.atom
    if isinstance(atom, MemSet):
        val = model.rep_of[atom.x] in model.sets.get(atom.s, frozenset())
    elif isinstance(atom, MemRel):
        pair = (model.rep_of[atom.x], model.rep_of[atom.y])
        val = pair in model.rels.get(atom.r, frozenset())
    else:
        val = model.rep_of[atom.a] == model.rep_of[atom.b]
    return val if lit.positive else not val


def model_satisfies(model: BranchModel, problem: GroundProblem) -> bool:
    """Every ground clause has a true literal under the model."""
    return all(
        any(lit_true_in_model(model, problem.decode_lit(c)) for c in cl)
        for cl in problem.clauses)


def branch_snapshot(problem: GroundProblem, branch: Branch) -> tuple[str, ...]:
    """Sorted rendering of the branch's literal store, for comparisons."""
    return tuple(sorted(
        lit_sexpr(problem.decode_lit(c)) for c in branch.lits))
