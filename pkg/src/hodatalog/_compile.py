"""Compilation of typed rules into evaluation closures and join plans.

Every expression compiles to a function ``f(env, ctx) -> (lo, hi)`` giving
its pair value under the interpretation pair exposed by ``ctx``.  ``ctx``
offers three lookups:

    ctx.atom(p, args)       pair of 0/1 for a fully applied predicate constant
    ctx.partial(p, prefix)  pair of masks for a partial application
    ctx.answers(p, pattern) iterable of (args, (lo, hi)) with hi == 1

Rule bodies are evaluated by a chain of step functions produced by
``plan_rule``: tests, domain enumerations and generators that bind
variables from relations instead of enumerating their whole domain.
Generators only skip states in which the literal has value (false, false),
which cannot change a join, so the result is the same as enumerating
every state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .analysis import TypedProgram, typecheck, first_order_type, is_first_order_pred
from .domains import (DEFAULT_LIMIT, Universe, apply_codes, block_sizes, cell_args,
                      cell_index, cells, check_limit, domain_size, interval, iter_bits)
from .errors import DomainExplosion, HodlError, TypeCheckError
from .syntax import (FALSE, App, Database, Eq, IndConst, IndVar, Iota, Not, PredConst,
                     PredVar, Program, Type, flatten_app, type_args, format_type)


@dataclass
class PredInfo:
    name: str
    type: Type
    args: tuple[Type, ...]
    cells: int                # saturating
    sizes: tuple[int, ...]    # domain size of each argument (saturating)


@dataclass
class CLit:
    index: int
    kind: str                     # eq, false, pred, var, neg
    ev: object                    # f(env, ctx) -> (lo, hi)
    vars: frozenset
    pred: str | None = None       # head constant for kind "pred"
    head_slot: int | None = None  # head variable slot for kind "var"
    head_type: Type | None = None
    arg_slots: tuple = ()         # slot of each argument if it is a plain variable, else None
    arg_fns: tuple = ()
    arg_vars: tuple = ()          # variable slots occurring in each argument
    full: bool = True
    preds: frozenset = frozenset()
    eq_sides: tuple = ()          # (slot or None, fn, vars) for both sides of '='


@dataclass
class CRule:
    index: int
    pred: str
    head_slots: tuple[int, ...]
    var_names: tuple[str, ...]
    var_types: tuple[Type, ...]
    lits: list[CLit]
    plans: dict = field(default_factory=dict)

    @property
    def nslots(self) -> int:
        return len(self.var_names)


class CompiledProgram:
    """A typed program plus database, universe and domain limit, ready to run."""

    def __init__(self, tp: TypedProgram, db: Database, universe: Universe, limit: int):
        self.tp = tp
        self.program = tp.program
        self.db = db
        self.universe = universe
        self.n = universe.n
        self.limit = limit
        decls = dict(tp.declarations)
        self.preds: dict[str, PredInfo] = {}
        for p, t in decls.items():
            args = type_args(t)
            self.preds[p] = PredInfo(p, t, args, cells(t, self.n),
                                     tuple(domain_size(a, self.n) for a in args))
        self.facts: dict[str, set[tuple[int, ...]]] = {p: set() for p in self.preds}
        for p, args in db.facts:
            self.facts[p].add(tuple(universe.index[c] for c in args))
        self.rules: list[CRule] = [self._compile_rule(i, r)
                                   for i, r in enumerate(tp.rules)]
        self.rules_by_pred: dict[str, list[CRule]] = {p: [] for p in self.preds}
        for r in self.rules:
            self.rules_by_pred[r.pred].append(r)

    # ---------------------------------------------------------- helpers

    def const_index(self, name: str) -> int:
        return self.universe.index[name]

    def pred_type(self, p: str) -> Type:
        return self.preds[p].type

    def domain(self, t: Type) -> range:
        size = check_limit(t, self.n, self.limit)
        return range(size)

    def all_cells(self, p: str):
        """Argument tuples of ``p`` in cell order."""
        info = self.preds[p]
        if info.cells > self.limit:
            raise DomainExplosion(f"cells of {p}", info.cells, self.limit)
        for idx in range(info.cells):
            yield cell_args(info.type, self.n, idx)

    # ------------------------------------------------------- compilation

    def _compile_rule(self, index: int, r) -> CRule:
        vt = self.tp.var_types[index]
        names = list(r.head_vars) + [v for v in vt if v not in r.head_vars]
        slots = {v: i for i, v in enumerate(names)}
        lits = [self._compile_lit(k, lit, slots, vt) for k, lit in enumerate(r.body)]
        return CRule(index, r.head, tuple(slots[v] for v in r.head_vars), tuple(names),
                     tuple(vt[v] for v in names), lits)

    def _compile_lit(self, k, lit, slots, vt) -> CLit:
        if isinstance(lit, Eq):
            sides = []
            for side in (lit.lhs, lit.rhs):
                fn, _ = self.compile_expr(side, slots, vt)
                slot = slots[side.name] if isinstance(side, IndVar) else None
                sides.append((slot, fn, frozenset(_vars(side, slots))))
            fl, fr = sides[0][1], sides[1][1]

            def ev(env, ctx, fl=fl, fr=fr):
                return (1, 1) if fl(env, ctx)[0] == fr(env, ctx)[0] else (0, 0)
            return CLit(k, "eq", ev, frozenset(_vars(lit, slots)), eq_sides=tuple(sides))
        if isinstance(lit, Not):
            inner = self._compile_lit(k, lit.atom, slots, vt)
            iev = inner.ev

            def ev(env, ctx, iev=iev):
                lo, hi = iev(env, ctx)
                return (1 - hi, 1 - lo)
            return CLit(k, "neg", ev, inner.vars, preds=inner.preds)
        head, args = flatten_app(lit)
        if isinstance(head, PredConst) and head.name == FALSE:
            return CLit(k, "false", lambda env, ctx: (0, 0), frozenset())
        fn, _ = self.compile_expr(lit, slots, vt)
        arg_fns = []
        arg_slots = []
        arg_vars = []
        for a in args:
            f, _ = self.compile_expr(a, slots, vt)
            arg_fns.append(f)
            arg_slots.append(slots[a.name] if isinstance(a, (IndVar, PredVar)) else None)
            arg_vars.append(frozenset(_vars(a, slots)))
        preds = frozenset(_preds(lit))
        if isinstance(head, PredConst):
            return CLit(k, "pred", fn, frozenset(_vars(lit, slots)), pred=head.name,
                        arg_slots=tuple(arg_slots), arg_fns=tuple(arg_fns),
                        arg_vars=tuple(arg_vars), preds=preds)
        return CLit(k, "var", fn, frozenset(_vars(lit, slots)), head_slot=slots[head.name],
                    head_type=vt[head.name], arg_slots=tuple(arg_slots),
                    arg_fns=tuple(arg_fns), arg_vars=tuple(arg_vars), preds=preds)

    def compile_expr(self, e, slots: dict[str, int], vt: dict[str, Type]):
        """Return (fn, type) for an expression; fn(env, ctx) -> (lo, hi)."""
        n = self.n
        if isinstance(e, (IndVar, PredVar)):
            s = slots[e.name]
            return (lambda env, ctx: (env[s], env[s])), vt[e.name]
        if isinstance(e, IndConst):
            c = self.universe.index[e.name]
            pair = (c, c)
            return (lambda env, ctx: pair), Iota()
        head, args = flatten_app(e)
        if isinstance(head, PredConst) and head.name == FALSE:
            from .syntax import BOOL
            return (lambda env, ctx: (0, 0)), BOOL
        sub = [self.compile_expr(a, slots, vt) for a in args]
        argfns = tuple(f for f, _ in sub)
        argtypes = tuple(t for _, t in sub)
        m = len(args)
        if isinstance(head, PredConst):
            p = head.name
            info = self.preds[p]
            full = m == len(info.args)
            rest_type = info.type
            for _ in range(m):
                rest_type = rest_type.result
            if m == 0:
                return (lambda env, ctx: ctx.partial(p, ())), info.type
            width = block_sizes(info.type, n)[m - 1]
            ones = 1 if full else (1 << width) - 1
            simple = all(isinstance(a, (IndVar, PredVar, IndConst)) for a in args)
            if simple:
                getters = []
                for a in args:
                    if isinstance(a, IndConst):
                        getters.append((None, self.universe.index[a.name]))
                    else:
                        getters.append((slots[a.name], None))
                if all(s is not None for s, _ in getters):
                    ss = tuple(s for s, _ in getters)
                    if len(ss) == 1:
                        s0 = ss[0]
                        if full:
                            return (lambda env, ctx: ctx.atom(p, (env[s0],))), rest_type
                        return (lambda env, ctx: ctx.partial(p, (env[s0],))), rest_type
                    if full:
                        return (lambda env, ctx: ctx.atom(p, tuple([env[s] for s in ss]))), rest_type
                    return (lambda env, ctx: ctx.partial(p, tuple([env[s] for s in ss]))), rest_type
                gs = tuple(getters)

                def key_of(env):
                    return tuple([env[s] if s is not None else c for s, c in gs])
                if full:
                    return (lambda env, ctx: ctx.atom(p, key_of(env))), rest_type
                return (lambda env, ctx: ctx.partial(p, key_of(env))), rest_type

            def fn(env, ctx):
                vals = [f(env, ctx) for f in argfns]
                if all(l == h for l, h in vals):
                    key = tuple([l for l, _ in vals])
                    return ctx.atom(p, key) if full else ctx.partial(p, key)
                lo, hi = ones, 0
                for combo in itertools.product(*[_interval_of(t, l, h)
                                                 for t, (l, h) in zip(argtypes, vals)]):
                    a, b = ctx.atom(p, combo) if full else ctx.partial(p, combo)
                    lo &= a
                    hi |= b
                return lo, hi
            return fn, rest_type
        # head is a predicate variable
        hs = slots[head.name]
        ht = vt[head.name]
        rest_type = ht
        for _ in range(m):
            rest_type = rest_type.result
        if m == 0:
            return (lambda env, ctx: (env[hs], env[hs])), ht
        bs = block_sizes(ht, n)
        width = bs[m - 1]
        ones = (1 << width) - 1
        if all(isinstance(a, (IndVar, PredVar)) for a in args):
            # plain variables are always exact: index the code directly
            ss = tuple(slots[a.name] for a in args)
            ws = bs[:m]
            if m == 1:
                s0, w0 = ss[0], ws[0]

                def vfn1(env, ctx):
                    r = (env[hs] >> (env[s0] * w0)) & ones
                    return r, r
                return vfn1, rest_type
            if m == 2:
                s0, s1 = ss
                w0, w1 = ws

                def vfn2(env, ctx):
                    r = (env[hs] >> (env[s0] * w0 + env[s1] * w1)) & ones
                    return r, r
                return vfn2, rest_type
            pairs = tuple(zip(ss, ws))

            def vfnk(env, ctx):
                off = 0
                for s, w in pairs:
                    off += env[s] * w
                r = (env[hs] >> off) & ones
                return r, r
            return vfnk, rest_type

        def vfn(env, ctx):
            v = env[hs]
            vals = [f(env, ctx) for f in argfns]
            if all(l == h for l, h in vals):
                r = apply_codes(ht, n, v, tuple([l for l, _ in vals]))
                return r, r
            lo, hi = ones, 0
            for combo in itertools.product(*[_interval_of(t, l, h)
                                             for t, (l, h) in zip(argtypes, vals)]):
                r = apply_codes(ht, n, v, combo)
                lo &= r
                hi |= r
            return lo, hi
        return vfn, rest_type


def _interval_of(t: Type, l: int, h: int):
    if isinstance(t, Iota):
        return (l,) if l == h else ()
    return interval(l, h)


def _vars(e, slots):
    if isinstance(e, (IndVar, PredVar)):
        yield slots[e.name]
    elif isinstance(e, App):
        yield from _vars(e.fun, slots)
        yield from _vars(e.arg, slots)
    elif isinstance(e, Eq):
        yield from _vars(e.lhs, slots)
        yield from _vars(e.rhs, slots)
    elif isinstance(e, Not):
        yield from _vars(e.atom, slots)


def _preds(e):
    if isinstance(e, PredConst):
        if e.name != FALSE:
            yield e.name
    elif isinstance(e, App):
        yield from _preds(e.fun)
        yield from _preds(e.arg)
    elif isinstance(e, Not):
        yield from _preds(e.atom)


def compile_program(prog: Program | TypedProgram, db: Database | None = None,
                    constants=(), limit: int = DEFAULT_LIMIT) -> CompiledProgram:
    """Typecheck (if needed), merge the database schema and fix the universe."""
    if db is None:
        db = Database(frozenset(), {}, ())
    program = prog.program if isinstance(prog, TypedProgram) else prog
    extra = {}
    for p, arity in db.schema.items():
        t = program.declarations.get(p)
        if t is None:
            extra[p] = first_order_type(arity)
        elif not is_first_order_pred(t) or len(type_args(t)) != arity:
            raise TypeCheckError(f"database predicate {p}/{arity} clashes with declaration "
                                 f"{format_type(t)}")
    if isinstance(prog, TypedProgram) and not extra:
        tp = prog
    else:
        decls = dict(program.declarations)
        decls.update(extra)
        program = Program(decls, program.rules, program.constants, program.allow_reserved)
        tp = typecheck(program)
    names = set(program.constants) | set(db.constants) | set(constants)
    universe = Universe(sorted(names))
    if universe.n == 0:
        raise HodlError("empty universe: the program and database mention no individual constants")
    return CompiledProgram(tp, db, universe, limit)


# ------------------------------------------------------------- planning

_TEST_RANK = {"eq": 0, "false": 0, "var": 1, "pred": 2, "neg": 3}


def _gen_candidate(lit: CLit, bound: set) -> bool:
    if lit.kind == "eq":
        (s1, _, v1), (s2, _, v2) = lit.eq_sides
        return (s1 is not None and s1 not in bound and v2 <= bound) or \
               (s2 is not None and s2 not in bound and v1 <= bound)
    if lit.kind == "pred" or (lit.kind == "var" and lit.head_slot in bound):
        if not lit.full:
            return False
        some_free = False
        for slot, vs in zip(lit.arg_slots, lit.arg_vars):
            if slot is not None and slot not in bound:
                some_free = True
            elif not vs <= bound:
                return False
        return some_free
    return False


def plan_rule(rule: CRule, bound_slots: frozenset, nogen: frozenset,
              rank_pred=None) -> list[tuple]:
    """Order the body into test / generator / enumeration steps."""
    bound = set(bound_slots)
    remaining = list(rule.lits)
    steps: list[tuple] = []
    while remaining:
        testable = [l for l in remaining if l.vars <= bound]
        if testable:
            lit = min(testable, key=lambda l: (_TEST_RANK[l.kind], l.index))
            steps.append(("test", lit))
            remaining.remove(lit)
            continue
        gens = [l for l in remaining if _gen_candidate(l, bound)
                and not (l.kind == "pred" and l.pred in nogen)]
        if gens:
            def score(l):
                if l.kind == "eq":
                    return (0, 0.0, 0, l.index)
                nb = sum(1 for s, vs in zip(l.arg_slots, l.arg_vars)
                         if (s is None and vs <= bound) or (s is not None and s in bound))
                kind = 1 if l.kind == "var" else 2
                # body order decides among literals that share a bound argument
                return (kind, 0 if nb else 1, l.index)
            lit = min(gens, key=score)
            if lit.kind == "eq":
                (s1, f1, v1), (s2, f2, v2) = lit.eq_sides
                if s1 is not None and s1 not in bound and v2 <= bound:
                    steps.append(("gen_eq", s1, f2))
                    bound.add(s1)
                else:
                    steps.append(("gen_eq", s2, f1))
                    bound.add(s2)
            else:
                steps.append(("gen", lit))
                bound |= {s for s in lit.arg_slots if s is not None}
            remaining.remove(lit)
            continue
        # enumerate one variable of the earliest literal, smallest domain first
        lit = min(remaining, key=lambda l: l.index)
        free = [s for s in lit.vars if s not in bound]
        s = min(free, key=lambda s: (domain_size(rule.var_types[s], 2), s))
        steps.append(("enum", s))
        bound.add(s)
    for s in range(rule.nslots):
        if s not in bound:
            steps.append(("enum", s))
            bound.add(s)
    return steps


def _mk_test(ev, nxt):
    def step(env, ctx, sink, lo, hi):
        l, h = ev(env, ctx)
        h &= hi
        if not h:
            return False
        return nxt(env, ctx, sink, l & lo, h)
    return step


def _mk_enum(slot, size, limit, t, nxt):
    def step(env, ctx, sink, lo, hi):
        if size > limit:
            raise DomainExplosion(format_type(t), size, limit)
        for v in range(size):
            env[slot] = v
            if nxt(env, ctx, sink, lo, hi):
                return True
        return False
    return step


def _mk_gen_eq(slot, fn, nxt):
    def step(env, ctx, sink, lo, hi):
        env[slot] = fn(env, ctx)[0]
        return nxt(env, ctx, sink, lo, hi)
    return step


def _enum_fallback(cp, rule, lit: CLit, nxt, bound):
    """Enumerate the literal's free variables and test it (used for inexact arguments)."""
    n = cp.n
    limit = cp.limit
    free = sorted({s for s in lit.arg_slots if s is not None and s not in bound})
    types = [rule.var_types[s] for s in free]
    ev = lit.ev

    def run(env, ctx, sink, lo, hi):
        doms = []
        for t in types:
            size = domain_size(t, n)
            if size > limit:
                raise DomainExplosion(format_type(t), size, limit)
            doms.append(range(size))
        for combo in itertools.product(*doms):
            for s, v in zip(free, combo):
                env[s] = v
            l, h = ev(env, ctx)
            h &= hi
            if h and nxt(env, ctx, sink, l & lo, h):
                return True
        return False
    return run


_SCAN_LIMIT = 64


def _mk_gen_var(cp, rule, lit: CLit, nxt, bound):
    """Bind the free arguments of ``V(args)`` from the set bits of V's value."""
    n = cp.n
    ht = lit.head_type
    hs = lit.head_slot
    m = len(lit.arg_slots)
    ws = block_sizes(ht, n)[:m]
    sizes = tuple(domain_size(a, n) for a in type_args(ht))
    fixed = []              # (weight, slot or None, fn)
    free_pos = []           # (position, slot)
    for i, (s, f) in enumerate(zip(lit.arg_slots, lit.arg_fns)):
        if s is None or s in bound:
            fixed.append((ws[i], s, f))
        else:
            free_pos.append((i, s))
    distinct = []
    for i, s in free_pos:
        if s not in distinct:
            distinct.append(s)
    exact_fixed = all(s is not None for _, s, _ in fixed)
    fallback = _enum_fallback(cp, rule, lit, nxt, bound)
    scan_size = 1
    for s in distinct:
        scan_size *= domain_size(rule.var_types[s], n)
    if scan_size <= _SCAN_LIMIT:
        # weight of each distinct free slot (summed over repeated positions)
        wsum = {s: 0 for s in distinct}
        for i, s in free_pos:
            wsum[s] += ws[i]
        combos = []
        for combo in itertools.product(*[range(domain_size(rule.var_types[s], n))
                                         for s in distinct]):
            combos.append((sum(v * wsum[s] for s, v in zip(distinct, combo)), combo))
        combos = tuple(combos)
        dslots = tuple(distinct)

        def scan(env, ctx, sink, lo, hi):
            code = env[hs]
            off = 0
            if exact_fixed:
                for w, s, _ in fixed:
                    off += env[s] * w
            else:
                for w, s, f in fixed:
                    l, h = f(env, ctx)
                    if l != h:
                        return fallback(env, ctx, sink, lo, hi)
                    off += l * w
            for delta, combo in combos:
                if (code >> (off + delta)) & 1:
                    for s, v in zip(dslots, combo):
                        env[s] = v
                    if nxt(env, ctx, sink, lo, hi):
                        return True
            return False
        return scan

    free_sizes = sizes
    dup = len(distinct) != len(free_pos)

    def bits(env, ctx, sink, lo, hi):
        code = env[hs]
        want = {}
        for (w, s, f), i in zip(fixed, [i for i in range(m) if i not in dict(free_pos)]):
            l, h = f(env, ctx) if s is None else (env[s], env[s])
            if l != h:
                return fallback(env, ctx, sink, lo, hi)
            want[i] = l
        for idx in iter_bits(code):
            digits = [0] * m
            for i in range(m - 1, -1, -1):
                idx, digits[i] = divmod(idx, free_sizes[i])
            if any(digits[i] != v for i, v in want.items()):
                continue
            if dup:
                seen = {}
                ok = True
                for i, s in free_pos:
                    if seen.setdefault(s, digits[i]) != digits[i]:
                        ok = False
                        break
                if not ok:
                    continue
            for i, s in free_pos:
                env[s] = digits[i]
            if nxt(env, ctx, sink, lo, hi):
                return True
        return False
    return bits


def _mk_gen_pred(cp, rule, lit: CLit, nxt, bound):
    """Bind the free arguments of ``p(args)`` from p's answers for the call pattern."""
    p = lit.pred
    specs = []
    free = []
    for i, (s, f) in enumerate(zip(lit.arg_slots, lit.arg_fns)):
        if s is None or s in bound:
            specs.append((s, f))
        else:
            specs.append(None)
            free.append((i, s))
    specs = tuple(specs)
    free = tuple(free)
    dup = len({s for _, s in free}) != len(free)
    fallback = _enum_fallback(cp, rule, lit, nxt, bound)

    def step(env, ctx, sink, lo, hi):
        pattern = []
        for spec in specs:
            if spec is None:
                pattern.append(None)
            elif spec[0] is not None:
                pattern.append(env[spec[0]])
            else:
                l, h = spec[1](env, ctx)
                if l != h:
                    return fallback(env, ctx, sink, lo, hi)
                pattern.append(l)
        for args, (al, ah) in list(ctx.answers(p, tuple(pattern))):
            h = ah & hi
            if not h:
                continue
            if dup:
                seen = {}
                if any(seen.setdefault(s, args[i]) != args[i] for i, s in free):
                    continue
            for i, s in free:
                env[s] = args[i]
            if nxt(env, ctx, sink, al & lo, h):
                return True
        return False
    return step


def compile_plan(cp: CompiledProgram, rule: CRule, bound_slots: frozenset,
                 nogen: frozenset = frozenset(), rank_pred=None):
    """Plan and chain a rule for a given set of pre-bound variable slots (cached)."""
    key = (bound_slots, nogen)
    hit = rule.plans.get(key)
    if hit is not None:
        return hit
    steps = plan_rule(rule, bound_slots, nogen, rank_pred)
    chain = _build_with_bound(cp, rule, steps, bound_slots)
    rule.plans[key] = (steps, chain)
    return steps, chain


def _build_with_bound(cp, rule, steps, bound_slots):
    n = cp.n
    limit = cp.limit

    def final(env, ctx, sink, lo, hi):
        return sink(env, lo, hi)

    # bound set before each step, computed forwards
    before = []
    bound = set(bound_slots)
    for st in steps:
        before.append(frozenset(bound))
        if st[0] == "gen":
            bound |= {s for s in st[1].arg_slots if s is not None}
        elif st[0] in ("enum", "gen_eq"):
            bound.add(st[1])
    nxt = final
    for st, bset in zip(reversed(steps), reversed(before)):
        kind = st[0]
        if kind == "test":
            nxt = _mk_test(st[1].ev, nxt)
        elif kind == "enum":
            slot = st[1]
            t = rule.var_types[slot]
            nxt = _mk_enum(slot, domain_size(t, n), limit, t, nxt)
        elif kind == "gen_eq":
            nxt = _mk_gen_eq(st[1], st[2], nxt)
        else:
            lit = st[1]
            nxt = (_mk_gen_var if lit.kind == "var" else _mk_gen_pred)(cp, rule, lit, nxt, bset)
    return nxt
