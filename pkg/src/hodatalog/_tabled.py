"""Demand-driven evaluation of the well-founded model, one dependency SCC at a time.

Predicates are grouped into strongly connected components of the
dependency graph.  A component without internal strict edges (no negation
or argument occurrence of a member inside a member's rule) is monotone in
its own predicates once lower components are fixed, so its well-founded
values are the least fixpoint of the component's operator; we compute the
needed part of that fixpoint with call-pattern tables.  Any other component
is materialized in full and solved with the alternating fixpoint of the
approximating operator restricted to it.  Lower components are always
finished before a higher one reads them, so every table a rule consults
from outside its own component is final.
"""

from __future__ import annotations

import networkx as nx

from ._compile import CompiledProgram, compile_plan
from .analysis import dependency_graph
from .domains import cell_args, cell_index, top_code
from .errors import BudgetExceeded, DomainExplosion, NonMonotoneStep
from .syntax import Program

_EMPTY: dict = {}


class _Subgoal:
    __slots__ = ("key", "answers", "complete", "dependents")

    def __init__(self, key):
        self.key = key
        self.answers: dict = {}
        self.complete = False
        self.dependents: set = set()


class TabledSolver:
    """Well-founded model of a compiled program, computed on demand.

    ``overrides`` fixes some predicates to given tables (args -> (lo, hi));
    their rules are ignored.  This is how the rest of a program is solved
    once a choice block has been decided.
    """

    def __init__(self, cp: CompiledProgram, overrides: dict | None = None,
                 budget: int | None = None):
        self.cp = cp
        self.n = cp.n
        self.budget = budget
        self.steps = 0
        self.full: dict[str, dict] = {}
        self.overridden = frozenset(overrides or ())
        for p, table in (overrides or {}).items():
            self.full[p] = {k: v for k, v in table.items() if v[1]}
        for p, facts in cp.facts.items():
            if p not in self.full and not cp.rules_by_pred[p]:
                self.full[p] = {args: (1, 1) for args in facts}
        rules = tuple(r for r in cp.program.rules if r.head not in self.overridden)
        prog = Program(cp.program.declarations, rules, cp.program.constants,
                       cp.program.allow_reserved)
        g = dependency_graph(prog)
        self.comp_of: dict[str, int] = {}
        self.members: list[frozenset] = []
        self.kind: list[str] = []
        self.flat: list[bool] = []     # single predicate, not recursive
        cond = nx.condensation(g)
        order = list(nx.topological_sort(cond))
        self.rank: dict[str, int] = {}
        for pos, c in enumerate(order):
            comp = frozenset(cond.nodes[c]["members"])
            ci = len(self.members)
            self.members.append(comp)
            strict = any(g.edges[q, p]["strict"] for q in comp for p in comp
                         if g.has_edge(q, p))
            self.kind.append("B" if strict else "A")
            (only,) = comp if len(comp) == 1 else (None,)
            self.flat.append(only is not None and not g.has_edge(only, only))
            for p in comp:
                self.comp_of[p] = ci
                self.rank[p] = pos
        self.tables: dict[tuple, _Subgoal] = {}
        self.index: dict[tuple, dict] = {}
        self.partial_cache: dict[tuple, tuple[int, int]] = {}
        self.lookups: dict[str, int] = {}
        self._rank_fn = self.rank.get
        self._outer = _OuterCtx(self)

    # ----------------------------------------------------------- queries

    def answers(self, p: str, pattern: tuple):
        """Final answers of ``p`` matching ``pattern`` (None = free) as (args, pair) items."""
        full = self.full.get(p)
        if full is None and self.kind[self.comp_of[p]] == "B":
            self._materialize_component(self.comp_of[p])
            full = self.full[p]
        if full is not None:
            return self._filter(p, full, pattern)
        return self._solve(p, pattern).items()

    def lookup(self, p: str, key: tuple) -> tuple[int, int]:
        full = self.full.get(p)
        if full is not None:
            return full.get(key, (0, 0))
        sg = self.tables.get((p, key))
        if sg is not None and sg.complete:
            return sg.answers.get(key, (0, 0))
        # many point lookups: cheaper to build the whole table once
        hits = self.lookups.get(p, 0) + 1
        self.lookups[p] = hits
        cells = self.cp.preds[p].cells
        if hits * 16 > cells and cells <= self.cp.limit and hits > 64:
            return self.materialize(p).get(key, (0, 0))
        if self.kind[self.comp_of[p]] == "B":
            self._materialize_component(self.comp_of[p])
            return self.full[p].get(key, (0, 0))
        return self._solve(p, key).get(key, (0, 0))

    def partial(self, p: str, prefix: tuple) -> tuple[int, int]:
        """Masks (lo, hi) of ``p`` applied to an argument prefix."""
        ck = (p, prefix)
        hit = self.partial_cache.get(ck)
        if hit is not None:
            return hit
        info = self.cp.preds[p]
        m = len(prefix)
        pattern = prefix + (None,) * (len(info.args) - m)
        res = _masks(self.answers(p, pattern), info.sizes[m:], m)
        self.partial_cache[ck] = res
        return res

    def materialize(self, p: str) -> dict:
        """Complete table of ``p`` (args -> pair, false atoms omitted)."""
        full = self.full.get(p)
        if full is None:
            info = self.cp.preds[p]
            if info.cells > self.cp.limit:
                raise DomainExplosion(f"cells of {p}", info.cells, self.cp.limit)
            if self.kind[self.comp_of[p]] == "B":
                self._materialize_component(self.comp_of[p])
            else:
                self.full[p] = dict(self._solve(p, (None,) * len(info.args)))
            full = self.full[p]
        return full

    # ------------------------------------------------------------ helpers

    def _tick(self):
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise BudgetExceeded(f"evaluation budget of {self.budget} steps exhausted")

    def _filter(self, p, full, pattern):
        bound = tuple(i for i, v in enumerate(pattern) if v is not None)
        if not bound:
            return full.items()
        if len(bound) == len(pattern):
            v = full.get(pattern)
            return ((pattern, v),) if v is not None else ()
        ik = (p, bound)
        idx = self.index.get(ik)
        if idx is None:
            idx = {}
            for args, v in full.items():
                idx.setdefault(tuple(args[i] for i in bound), []).append((args, v))
            self.index[ik] = idx
        return idx.get(tuple(pattern[i] for i in bound), ())

    def _eval_head(self, p, pattern, ctx, nogen, out):
        """Join the bodies of all rules for ``p`` under ``ctx`` into ``out``."""
        cp = self.cp
        bound_pos = [i for i, v in enumerate(pattern) if v is not None]
        all_bound = len(bound_pos) == len(pattern)
        for args in cp.facts[p]:
            if all(args[i] == pattern[i] for i in bound_pos):
                out[args] = (1, 1)
        if all_bound and out:
            return out
        for rule in cp.rules_by_pred[p]:
            hs = rule.head_slots
            bound_slots = frozenset(hs[i] for i in bound_pos)
            _, chain = compile_plan(cp, rule, bound_slots, nogen, self._rank_fn)
            env = [None] * rule.nslots
            for i in bound_pos:
                env[hs[i]] = pattern[i]

            def sink(env, lo, hi, hs=hs):
                key = tuple([env[s] for s in hs])
                old = out.get(key)
                if old is not None:
                    lo |= old[0]
                    hi |= old[1]
                out[key] = (lo, hi)
                return all_bound and lo == 1
            if chain(env, ctx, sink, 1, 1):
                break
        return out

    # ------------------------------------------------ positive components

    def _solve(self, p: str, pattern: tuple) -> dict:
        key = (p, pattern)
        sg = self.tables.get(key)
        if sg is not None and sg.complete:
            return sg.answers
        ci = self.comp_of[p]
        if self.flat[ci]:
            self._tick()
            sg = _Subgoal(key)
            sg.answers = self._eval_head(p, pattern, self._outer, frozenset(), {})
            sg.complete = True
            self.tables[key] = sg
            return sg.answers
        run = _Run(self, ci)
        run.get(key, None)
        run.loop()
        return self.tables[key].answers

    # -------------------------------------------- non-monotone components

    def _materialize_component(self, ci: int):
        cp = self.cp
        members = sorted(self.members[ci])
        for p in members:
            info = cp.preds[p]
            if info.cells > cp.limit:
                raise DomainExplosion(f"cells of {p}", info.cells, cp.limit)
        lo = {p: 0 for p in members}
        hi = {p: top_code(cp.preds[p].type, self.n) for p in members}
        cap = 1 + sum(cp.preds[p].cells for p in members)
        for _ in range(cap + 1):
            new_lo = self.component_lfp(members, 0, hi, {p: 0 for p in members})
            new_hi = self.component_lfp(members, 1, lo, dict(lo))
            if new_lo == lo and new_hi == hi:
                break
            lo, hi = new_lo, new_hi
        else:
            raise NonMonotoneStep("alternating fixpoint did not settle within its bound")
        for p in members:
            table = {}
            t = cp.preds[p].type
            for idx in _bits(hi[p]):
                table[cell_args(t, self.n, idx)] = ((lo[p] >> idx) & 1, 1)
            self.full[p] = table

    def component_step(self, members, lo: dict, hi: dict) -> tuple[dict, dict]:
        """One application of the operator to the member predicates, lower parts fixed."""
        cp = self.cp
        ctx = _PairCtx(self, lo, hi)
        nogen = frozenset(members)
        out_lo, out_hi = {}, {}
        for p in members:
            info = cp.preds[p]
            a = b = 0
            for idx in range(info.cells):
                self._tick()
                args = cell_args(info.type, self.n, idx)
                res = self._eval_head(p, args, ctx, nogen, {})
                l, h = res.get(args, (0, 0))
                a |= l << idx
                b |= h << idx
            out_lo[p], out_hi[p] = a, b
        return out_lo, out_hi

    def component_lfp(self, members, which: int, fixed: dict, start: dict,
                      strict: bool = True) -> dict:
        """lfp of A(., fixed)_1 (which=0) or A(fixed, .)_2 (which=1) on the members.

        With ``strict=False`` a decreasing iterate is returned instead of raising;
        the stability checks use this to reject candidates.
        """
        x = start
        cap = 2 + sum(self.cp.preds[p].cells for p in members)
        for _ in range(cap):
            if which == 0:
                nxt = self.component_step(members, x, fixed)[0]
            else:
                nxt = self.component_step(members, fixed, x)[1]
            if nxt == x:
                return x
            if which == 0 and any(nxt[p] & ~fixed[p] for p in members):
                return nxt  # left the interval below ``fixed``: no stable pair here
            if any(x[p] & ~nxt[p] for p in members):
                if not strict:
                    return nxt
                raise NonMonotoneStep("component iterate decreased")
            x = nxt
        raise NonMonotoneStep("component fixpoint did not settle within its bound")


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _masks(items, sizes, m):
    lo = hi = 0
    for args, (l, h) in items:
        idx = 0
        for a, r in zip(args[m:], sizes):
            idx = idx * r + a
        lo |= l << idx
        hi |= h << idx
    return lo, hi


class _Run:
    """Local fixpoint over the subgoals of one positive component."""

    def __init__(self, solver: TabledSolver, comp: int):
        self.solver = solver
        self.comp = comp
        self.stack: list[_Subgoal] = []
        self.queued: set = set()
        self.created: list[_Subgoal] = []
        self.ctx = _RunCtx(self)

    def get(self, key, reader) -> _Subgoal:
        tables = self.solver.tables
        sg = tables.get(key)
        if sg is None:
            sg = _Subgoal(key)
            tables[key] = sg
            self.created.append(sg)
            self.stack.append(sg)
            self.queued.add(key)
        if reader is not None and not sg.complete:
            sg.dependents.add(reader)
        return sg

    def loop(self):
        solver = self.solver
        ctx = self.ctx
        while self.stack:
            sg = self.stack.pop()
            self.queued.discard(sg.key)
            solver._tick()
            p, pattern = sg.key
            ctx.reader = sg
            new = solver._eval_head(p, pattern, ctx, frozenset(), {})
            old = sg.answers
            if new == old:
                continue
            for k, (l, h) in old.items():
                nl, nh = new.get(k, (0, 0))
                if l & ~nl or h & ~nh:
                    raise NonMonotoneStep(f"answers of {p} shrank during a monotone fixpoint")
            sg.answers = new
            for d in sg.dependents:
                if d.key not in self.queued:
                    self.queued.add(d.key)
                    self.stack.append(d)
        for sg in self.created:
            sg.complete = True
            sg.dependents = set()


class _RunCtx:
    def __init__(self, run: _Run):
        self.run = run
        self.solver = run.solver
        self.comp = run.comp
        self.comp_of = run.solver.comp_of
        self.reader = None

    def atom(self, p, key):
        if self.comp_of[p] == self.comp:
            return self.run.get((p, key), self.reader).answers.get(key, (0, 0))
        return self.solver.lookup(p, key)

    def answers(self, p, pattern):
        if self.comp_of[p] == self.comp:
            return self.run.get((p, pattern), self.reader).answers.items()
        return self.solver.answers(p, pattern)

    def partial(self, p, prefix):
        if self.comp_of[p] == self.comp:
            info = self.solver.cp.preds[p]
            m = len(prefix)
            pattern = prefix + (None,) * (len(info.args) - m)
            return _masks(self.answers(p, pattern), info.sizes[m:], m)
        return self.solver.partial(p, prefix)


class _OuterCtx:
    """Reads that never touch the component being evaluated."""

    def __init__(self, solver: TabledSolver):
        self.atom = solver.lookup
        self.answers = solver.answers
        self.partial = solver.partial


class _PairCtx:
    """Members of the component read from explicit (lo, hi) codes."""

    def __init__(self, solver: TabledSolver, lo: dict, hi: dict):
        self.solver = solver
        self.lo = lo
        self.hi = hi
        self.preds = solver.cp.preds
        self.n = solver.n

    def atom(self, p, key):
        lo = self.lo.get(p)
        if lo is None:
            return self.solver.lookup(p, key)
        idx = cell_index(self.preds[p].type, self.n, key)
        return (lo >> idx) & 1, (self.hi[p] >> idx) & 1

    def answers(self, p, pattern):
        return self.solver.answers(p, pattern)

    def partial(self, p, prefix):
        lo = self.lo.get(p)
        if lo is None:
            return self.solver.partial(p, prefix)
        from .domains import apply_codes
        t = self.preds[p].type
        if not prefix:
            return lo, self.hi[p]
        return apply_codes(t, self.n, lo, prefix), apply_codes(t, self.n, self.hi[p], prefix)
