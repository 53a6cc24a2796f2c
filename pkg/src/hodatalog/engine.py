"""Pair semantics, the approximating operator, well-founded and stable models.

Two evaluators share the compiled form of a program:

* the *reference* operator materializes every predicate and applies
  ``A_P`` literally, enumerating every state of every rule;
* the *tabled* solver (``_tabled.TabledSolver``) computes the same
  well-founded model on demand, component by component.

Functions accept a ``Program``, a ``TypedProgram`` or a ``CompiledProgram``
plus an optional ``Database``.
"""

from __future__ import annotations

import itertools
import warnings
from collections.abc import Mapping
from dataclasses import dataclass

from ._compile import CompiledProgram, compile_program
from ._tabled import TabledSolver
from .analysis import TypedProgram, choice_block, stratify, type_of
from .domains import (DEFAULT_LIMIT, PairValue, SemVal, ThreeVal, apply_codes, block_sizes,
                      cell_args, cell_index, domain_size, info_leq, iter_bits,
                      tau_inv, top_code)
from .errors import DomainExplosion, EvaluationError, HodlError, NonMonotoneStep
from .syntax import (BOOL, FALSE, App, Arrow, Bool, Database, Eq, IndConst, IndVar, Iota,
                     Not, PredConst, PredVar, Program, Type, format_type, type_args)

__all__ = [
    "Interp", "PairInterp", "TabledModel", "compile_program", "eval_pair", "ap_step",
    "lfp_first", "lfp_second", "well_founded_model", "is_stable_fixpoint",
    "stable_models", "query", "tp_three_valued", "bottom_pair",
]


def _compiled(prog, db=None, constants=(), limit=DEFAULT_LIMIT) -> CompiledProgram:
    if isinstance(prog, CompiledProgram):
        return prog
    return compile_program(prog, db, constants, limit)


# ------------------------------------------------------------------ models

class Interp(Mapping):
    """Two-valued Herbrand interpretation: predicate name -> SemVal."""

    def __init__(self, cp: CompiledProgram, codes: dict[str, int]):
        self.cp = cp
        self.codes = dict(codes)

    def __getitem__(self, p: str) -> SemVal:
        return SemVal(self.cp.preds[p].type, self.codes[p], self.cp.universe)

    def __iter__(self):
        return iter(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other) -> bool:
        if isinstance(other, Interp):
            return self.codes == other.codes
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.codes.items())))

    def holds(self, p: str, args=()) -> bool:
        key = _arg_codes(self.cp, p, args)
        idx = cell_index(self.cp.preds[p].type, self.cp.n, key)
        return bool((self.codes[p] >> idx) & 1)

    def value(self, p: str, args=()) -> ThreeVal:
        return ThreeVal.TRUE if self.holds(p, args) else ThreeVal.FALSE

    def true_atoms(self, p: str) -> list[tuple]:
        return _decode_cells(self.cp, p, self.codes[p])

    def restrict(self, preds) -> Interp:
        return Interp(self.cp, {p: self.codes[p] for p in preds})

    def __repr__(self):
        return "Interp(" + ", ".join(f"{p}={self[p]}" for p in sorted(self.codes)) + ")"


@dataclass(frozen=True, eq=False)
class PairInterp:
    """A consistent pair (lo, hi) of interpretations; lo underestimates truth."""
    lo: Interp
    hi: Interp

    def __post_init__(self):
        for p, c in self.lo.codes.items():
            if c & ~self.hi.codes[p]:
                raise HodlError(f"inconsistent pair at predicate {p}")

    @property
    def cp(self) -> CompiledProgram:
        return self.lo.cp

    def __eq__(self, other):
        if not isinstance(other, PairInterp):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def pair(self, p: str, key: tuple) -> tuple[int, int]:
        idx = cell_index(self.cp.preds[p].type, self.cp.n, key)
        return (self.lo.codes[p] >> idx) & 1, (self.hi.codes[p] >> idx) & 1

    def value(self, p: str, args=()) -> ThreeVal:
        lo, hi = self.pair(p, _arg_codes(self.cp, p, args))
        return ThreeVal(lo + hi)

    def relation(self, p: str) -> PairValue:
        return PairValue(self.lo[p], self.hi[p])

    def three_valued(self, p: str):
        return tau_inv((self.lo.codes[p], self.hi.codes[p]), self.cp.preds[p].type,
                       self.cp.universe)

    def atoms(self, p: str) -> list[tuple[tuple, ThreeVal]]:
        """Atoms of ``p`` that are not false, with their truth value."""
        lo, hi = self.lo.codes[p], self.hi.codes[p]
        out = []
        for args, idx in _decode_with_index(self.cp, p, hi):
            out.append((args, ThreeVal.TRUE if (lo >> idx) & 1 else ThreeVal.UNDEF))
        return out

    def is_two_valued(self, preds=None) -> bool:
        preds = self.lo.codes if preds is None else preds
        return all(self.lo.codes[p] == self.hi.codes[p] for p in preds)

    def restrict(self, preds) -> PairInterp:
        return PairInterp(self.lo.restrict(preds), self.hi.restrict(preds))

    def to_pair(self, preds=None) -> PairInterp:
        return self if preds is None else self.restrict(preds)

    @property
    def predicates(self):
        return tuple(self.lo.codes)


class TabledModel:
    """Well-founded model backed by a tabled solver; relations are computed on demand."""

    def __init__(self, solver: TabledSolver, preds=None):
        self.solver = solver
        self.cp = solver.cp
        self._preds = tuple(self.cp.preds) if preds is None else tuple(preds)

    @property
    def predicates(self):
        return self._preds

    def _check(self, p):
        if p not in self._preds:
            raise EvaluationError(f"unknown predicate {p}")

    def pair(self, p: str, key: tuple) -> tuple[int, int]:
        self._check(p)
        return self.solver.lookup(p, tuple(key))

    def value(self, p: str, args=()) -> ThreeVal:
        lo, hi = self.pair(p, _arg_codes(self.cp, p, args))
        return ThreeVal(lo + hi)

    def holds(self, p: str, args=()) -> bool:
        return self.value(p, args) == ThreeVal.TRUE

    def codes(self, p: str) -> tuple[int, int]:
        self._check(p)
        info = self.cp.preds[p]
        table = self.solver.materialize(p)
        lo = hi = 0
        for args, (l, h) in table.items():
            idx = cell_index(info.type, self.cp.n, args)
            lo |= l << idx
            hi |= h << idx
        return lo, hi

    def relation(self, p: str) -> PairValue:
        lo, hi = self.codes(p)
        t = self.cp.preds[p].type
        return PairValue(SemVal(t, lo, self.cp.universe), SemVal(t, hi, self.cp.universe))

    def three_valued(self, p: str):
        return tau_inv(self.codes(p), self.cp.preds[p].type, self.cp.universe)

    def atoms(self, p: str) -> list[tuple[tuple, ThreeVal]]:
        self._check(p)
        table = self.solver.materialize(p)
        out = []
        for args in sorted(table):
            lo, hi = table[args]
            out.append((_names(self.cp, p, args), ThreeVal(lo + hi)))
        return out

    def true_atoms(self, p: str) -> list[tuple]:
        return [a for a, v in self.atoms(p) if v == ThreeVal.TRUE]

    def is_two_valued(self, preds=None) -> bool:
        preds = self._preds if preds is None else preds
        return all(v != ThreeVal.UNDEF for p in preds for _, v in self.atoms(p))

    def to_pair(self, preds=None) -> PairInterp:
        preds = self._preds if preds is None else tuple(preds)
        lo, hi = {}, {}
        for p in preds:
            lo[p], hi[p] = self.codes(p)
        return PairInterp(Interp(self.cp, lo), Interp(self.cp, hi))

    def restrict(self, preds) -> TabledModel:
        for p in preds:
            self._check(p)
        return TabledModel(self.solver, preds)

    def to_interp(self, preds=None) -> Interp:
        pi = self.to_pair(preds)
        if not pi.is_two_valued():
            raise EvaluationError("model is not two-valued")
        return pi.lo


def _arg_codes(cp: CompiledProgram, p: str, args) -> tuple[int, ...]:
    if p not in cp.preds:
        raise EvaluationError(f"unknown predicate {p}")
    types = cp.preds[p].args
    if len(args) != len(types):
        raise EvaluationError(f"{p} expects {len(types)} arguments, got {len(args)}")
    out = []
    for a, t in zip(args, types):
        if isinstance(a, SemVal):
            out.append(a.code)
        elif isinstance(a, str):
            if a not in cp.universe.index:
                raise EvaluationError(f"unknown constant {a}")
            out.append(cp.universe.index[a])
        else:
            out.append(int(a))
        if out[-1] < 0 or out[-1] >= domain_size(t, cp.n):
            raise EvaluationError(f"argument {a!r} outside the domain of {format_type(t)}")
    return tuple(out)


def _names(cp: CompiledProgram, p: str, args: tuple) -> tuple:
    out = []
    for a, t in zip(args, cp.preds[p].args):
        out.append(cp.universe.constants[a] if isinstance(t, Iota) else SemVal(t, a, cp.universe))
    return tuple(out)


def _decode_with_index(cp, p, code):
    t = cp.preds[p].type
    for idx in iter_bits(code):
        yield _names(cp, p, cell_args(t, cp.n, idx)), idx


def _decode_cells(cp, p, code):
    return [a for a, _ in _decode_with_index(cp, p, code)]


# ------------------------------------------------------ reference operator

class _FullCtx:
    """Lookups into fully materialized (lo, hi) codes."""

    __slots__ = ("cp", "lo", "hi", "n")

    def __init__(self, cp, lo: dict, hi: dict):
        self.cp = cp
        self.lo = lo
        self.hi = hi
        self.n = cp.n

    def atom(self, p, key):
        idx = cell_index(self.cp.preds[p].type, self.n, key)
        return (self.lo[p] >> idx) & 1, (self.hi[p] >> idx) & 1

    def partial(self, p, prefix):
        if not prefix:
            return self.lo[p], self.hi[p]
        t = self.cp.preds[p].type
        return apply_codes(t, self.n, self.lo[p], prefix), apply_codes(t, self.n, self.hi[p], prefix)

    def answers(self, p, pattern):      # the reference operator never plans generators
        raise AssertionError("generators are not used by the reference operator")


def _check_materializable(cp: CompiledProgram):
    for p, info in cp.preds.items():
        if info.cells > cp.limit:
            raise DomainExplosion(f"cells of {p}", info.cells, cp.limit)


def _ref_atom(cp: CompiledProgram, rule, args, ctx) -> tuple[int, int]:
    """Join of the body over every state extending the head binding."""
    env = [None] * rule.nslots
    for s, a in zip(rule.head_slots, args):
        env[s] = a
    head = set(rule.head_slots)
    free = [s for s in range(rule.nslots) if s not in head]
    doms = []
    for s in free:
        t = rule.var_types[s]
        size = domain_size(t, cp.n)
        if size > cp.limit:
            raise DomainExplosion(format_type(t), size, cp.limit)
        doms.append(range(size))
    best_lo = best_hi = 0
    for combo in itertools.product(*doms):
        for s, v in zip(free, combo):
            env[s] = v
        lo = hi = 1
        for lit in rule.lits:
            l, h = lit.ev(env, ctx)
            lo &= l
            hi &= h
            if not hi:
                break
        best_lo |= lo
        best_hi |= hi
        if best_lo:
            break
    return best_lo, best_hi


def _ref_step(cp: CompiledProgram, lo: dict, hi: dict) -> tuple[dict, dict]:
    ctx = _FullCtx(cp, lo, hi)
    out_lo, out_hi = {}, {}
    for p, info in cp.preds.items():
        facts = cp.facts[p]
        rules = cp.rules_by_pred[p]
        a = b = 0
        for idx in range(info.cells):
            args = cell_args(info.type, cp.n, idx)
            if args in facts:
                a |= 1 << idx
                b |= 1 << idx
                continue
            l = h = 0
            for r in rules:
                rl, rh = _ref_atom(cp, r, args, ctx)
                l |= rl
                h |= rh
                if l:
                    break
            a |= l << idx
            b |= h << idx
        out_lo[p], out_hi[p] = a, b
    return out_lo, out_hi


def _codes_of(x) -> dict:
    return x.codes if isinstance(x, Interp) else dict(x)


def bottom_pair(prog, db=None, **kw) -> PairInterp:
    """(bottom, top): the least element of the information order."""
    cp = _compiled(prog, db, **kw)
    _check_materializable(cp)
    return PairInterp(Interp(cp, {p: 0 for p in cp.preds}),
                      Interp(cp, {p: top_code(i.type, cp.n) for p, i in cp.preds.items()}))


def ap_step(prog, db=None, pi: PairInterp | None = None, **kw) -> PairInterp:
    """One application of the approximating operator to a consistent pair."""
    cp = pi.cp if prog is None else _compiled(prog, db, **kw)
    _check_materializable(cp)
    if pi is None:
        pi = bottom_pair(cp)
    lo, hi = _ref_step(cp, pi.lo.codes, pi.hi.codes)
    return PairInterp(Interp(cp, lo), Interp(cp, hi))


def _lfp(cp, which: int, fixed: dict, start: dict, strict: bool = True) -> dict:
    x = dict(start)
    cap = 2 + sum(i.cells for i in cp.preds.values())
    for _ in range(cap):
        if which == 0:
            nxt = _ref_step(cp, x, fixed)[0]
        else:
            nxt = _ref_step(cp, fixed, x)[1]
        if nxt == x:
            return x
        if which == 0 and any(nxt[p] & ~fixed[p] for p in x):
            return nxt  # left the interval below ``fixed``: no stable pair here
        if any(x[p] & ~nxt[p] for p in x):
            if not strict:
                return nxt
            raise NonMonotoneStep("iterate decreased")
        x = nxt
    raise NonMonotoneStep("iteration did not settle within its bound")


def lfp_first(prog, db=None, j: Interp | dict | None = None, **kw) -> Interp:
    """Least fixpoint of A(., J)_1, iterated from bottom."""
    cp = _compiled(prog, db, **kw)
    _check_materializable(cp)
    fixed = _codes_of(j) if j is not None else \
        {p: top_code(i.type, cp.n) for p, i in cp.preds.items()}
    return Interp(cp, _lfp(cp, 0, fixed, {p: 0 for p in cp.preds}))


def lfp_second(prog, db=None, i: Interp | dict | None = None, start=None, **kw) -> Interp:
    """Least fixpoint of A(I, .)_2, iterated from ``start`` (bottom by default)."""
    cp = _compiled(prog, db, **kw)
    _check_materializable(cp)
    fixed = _codes_of(i) if i is not None else {p: 0 for p in cp.preds}
    s = _codes_of(start) if start is not None else {p: 0 for p in cp.preds}
    return Interp(cp, _lfp(cp, 1, fixed, s))


def _wfs_reference(cp: CompiledProgram) -> PairInterp:
    _check_materializable(cp)
    lo = {p: 0 for p in cp.preds}
    hi = {p: top_code(i.type, cp.n) for p, i in cp.preds.items()}
    cap = 1 + sum(i.cells for i in cp.preds.values())
    for _ in range(cap + 1):
        new_lo = _lfp(cp, 0, hi, {p: 0 for p in cp.preds})
        new_hi = _lfp(cp, 1, lo, lo)
        if new_lo == lo and new_hi == hi:
            return PairInterp(Interp(cp, lo), Interp(cp, hi))
        lo, hi = new_lo, new_hi
    raise NonMonotoneStep("alternating fixpoint did not settle within its bound")


def well_founded_model(prog, db=None, method: str = "tabled", budget: int | None = None,
                       **kw):
    """Well-founded model.

    ``method="tabled"`` returns a lazy ``TabledModel``; ``"reference"``
    materializes everything with the literal operator and returns a
    ``PairInterp``.  Both answer ``value``, ``atoms``, ``relation``,
    ``three_valued`` and ``to_pair``.
    """
    cp = _compiled(prog, db, **kw)
    if method == "reference":
        return _wfs_reference(cp)
    if method != "tabled":
        raise EvaluationError(f"unknown method {method!r}")
    return TabledModel(TabledSolver(cp, budget=budget))


def is_stable_fixpoint(prog, db=None, pi: PairInterp | None = None, **kw) -> bool:
    """I = lfp A(., J)_1 and J = lfp A(I, .)_2.

    The first is iterated from bottom, the second from I so that every
    intermediate pair stays consistent.
    """
    cp = pi.cp if prog is None else _compiled(prog, db, **kw)
    _check_materializable(cp)
    lo, hi = pi.lo.codes, pi.hi.codes
    zeros = {p: 0 for p in cp.preds}
    if any(lo[p] & ~hi[p] for p in lo):
        return False
    return (_lfp(cp, 0, hi, zeros, strict=False) == lo
            and _lfp(cp, 1, lo, lo, strict=False) == hi)


def is_stable_model(prog, db=None, interp: Interp | None = None, **kw) -> bool:
    return is_stable_fixpoint(prog, db, PairInterp(interp, interp), **kw)


# ------------------------------------------------------------ stable models

def _candidate_count_guard(n_undef: int, limit: int):
    if n_undef >= 63 or (1 << n_undef) > limit:
        raise DomainExplosion(f"assignments to {n_undef} undefined atoms", 1 << min(n_undef, 64),
                              limit)


def _stable_exhaustive(cp: CompiledProgram) -> list[Interp]:
    wfs = TabledModel(TabledSolver(cp)).to_pair()
    lo, hi = wfs.lo.codes, wfs.hi.codes
    undef = [(p, idx) for p in cp.preds for idx in iter_bits(hi[p] & ~lo[p])]
    if not undef:
        return [wfs.lo]
    _candidate_count_guard(len(undef), cp.limit)
    zeros = {p: 0 for p in cp.preds}
    out = []
    for bits in itertools.product((0, 1), repeat=len(undef)):
        m = dict(lo)
        for (p, idx), b in zip(undef, bits):
            if b:
                m[p] |= 1 << idx
        if _lfp(cp, 0, m, zeros, False) == m and _lfp(cp, 1, m, m, False) == m:
            out.append(Interp(cp, m))
    return out


def _stable_choice_guided(cp: CompiledProgram, budget=None) -> list[TabledModel]:
    ca = choice_block(cp.program)
    if not ca.candidate:
        raise EvaluationError(f"choice-guided enumeration needs a stratified remainder: {ca.reason}")
    block = sorted(ca.choice_preds)
    solver = TabledSolver(cp, budget=budget)
    for p in block:
        solver.materialize(p)
    lo, hi = {}, {}
    for p in block:
        a = b = 0
        t = cp.preds[p].type
        for args, (l, h) in solver.full[p].items():
            idx = cell_index(t, cp.n, args)
            a |= l << idx
            b |= h << idx
        lo[p], hi[p] = a, b
    undef = [(p, idx) for p in block for idx in iter_bits(hi[p] & ~lo[p])]
    _candidate_count_guard(len(undef), cp.limit)
    models = []
    zeros = {p: 0 for p in block}
    for bits in itertools.product((0, 1), repeat=len(undef)):
        m = dict(lo)
        for (p, idx), b in zip(undef, bits):
            if b:
                m[p] |= 1 << idx
        if solver.component_lfp(block, 0, m, zeros, strict=False) != m:
            continue
        if solver.component_lfp(block, 1, m, dict(m), strict=False) != m:
            continue
        overrides = {}
        for p in block:
            t = cp.preds[p].type
            overrides[p] = {cell_args(t, cp.n, idx): (1, 1) for idx in iter_bits(m[p])}
        models.append(TabledModel(TabledSolver(cp, overrides=overrides, budget=budget)))
    return models


def stable_models(prog, db=None, strategy: str = "auto", budget: int | None = None, **kw):
    """All stable models.

    When the well-founded model is two-valued it is the only stable model
    and is returned directly (as a lazy ``TabledModel``).  Otherwise
    ``exhaustive`` tries every completion of the undefined atoms (as
    ``Interp``), and ``choice-guided`` splits on the choice block only.
    ``auto`` picks choice-guided when the program has that shape.
    """
    cp = _compiled(prog, db, **kw)
    if strategy not in ("auto", "exhaustive", "choice-guided"):
        raise EvaluationError(f"unknown strategy {strategy!r}")
    strat = stratify(cp.program)
    if strat.stratified:
        return [TabledModel(TabledSolver(cp, budget=budget))]
    if strategy == "auto":
        strategy = "choice-guided" if choice_block(cp.program).candidate else "exhaustive"
    if strategy == "choice-guided":
        return _stable_choice_guided(cp, budget)
    return _stable_exhaustive(cp)


def query(prog, db=None, atom=None, mode: str = "wfs", strategy: str = "auto",
          budget: int | None = None, **kw):
    """Answer a ground atom ``(pred, args)``.

    ``wfs`` gives a ThreeVal; ``cautious`` and ``brave`` give bools.  With no
    stable models, cautious answers False and warns.
    """
    cp = _compiled(prog, db, **kw)
    p, args = atom
    key = _arg_codes(cp, p, args)
    if mode == "wfs":
        return TabledModel(TabledSolver(cp, budget=budget)).value(p, key)
    if mode not in ("cautious", "brave"):
        raise EvaluationError(f"unknown mode {mode!r}")
    models = stable_models(cp, strategy=strategy, budget=budget)
    vals = [m.value(p, key) == ThreeVal.TRUE for m in models]
    if mode == "brave":
        return any(vals)
    if not models:
        warnings.warn("no stable models: cautious answer reported as false", stacklevel=2)
        return False
    return all(vals)


# ------------------------------------------------------------ eval_pair

def eval_pair(e, pi: PairInterp, s: Mapping[str, SemVal]) -> PairValue:
    """Pair value of an expression under a consistent pair and a state."""
    cp = pi.cp
    slots = {v: i for i, v in enumerate(s)}
    vt = {v: val.type for v, val in s.items()}
    env = [s[v].code for v in s]
    if isinstance(e, (Eq, Not)):
        fn, t = cp._compile_lit(0, e, slots, vt).ev, BOOL
    else:
        fn, t = cp.compile_expr(e, slots, vt)
    lo, hi = fn(env, _FullCtx(cp, pi.lo.codes, pi.hi.codes))
    return PairValue(SemVal(t, lo, cp.universe), SemVal(t, hi, cp.universe))


# ------------------------------------------- three-valued consequence step

def _two_to_three(t: Type, n: int, code: int):
    if isinstance(t, Bool):
        return ThreeVal.TRUE if code else ThreeVal.FALSE
    width = block_sizes(t, n)[0]
    mask = (1 << width) - 1
    return tuple(_two_to_three(t.result, n, (code >> (d * width)) & mask)
                 for d in range(domain_size(t.arg, n)))


def _glb_info(t: Type, vals: list):
    if isinstance(t, Bool):
        first = vals[0]
        return first if all(v == first for v in vals) else ThreeVal.UNDEF
    return tuple(_glb_info(t.result, [v[i] for v in vals]) for i in range(len(vals[0])))


def _eval3(cp, e, interp3: dict, state: dict, vt: dict):
    """Direct three-valued meaning of an expression (tuple form)."""
    n = cp.n
    if isinstance(e, IndVar):
        return state[e.name]
    if isinstance(e, PredVar):
        return _two_to_three(vt[e.name], n, state[e.name])
    if isinstance(e, IndConst):
        return cp.universe.index[e.name]
    if isinstance(e, PredConst):
        if e.name == FALSE:
            return ThreeVal.FALSE
        return interp3[e.name]
    if isinstance(e, Eq):
        return ThreeVal.TRUE if _eval3(cp, e.lhs, interp3, state, vt) == \
            _eval3(cp, e.rhs, interp3, state, vt) else ThreeVal.FALSE
    if isinstance(e, Not):
        return ThreeVal(2 - _eval3(cp, e.atom, interp3, state, vt))
    assert isinstance(e, App)
    f = _eval3(cp, e.fun, interp3, state, vt)
    ft = type_of(e.fun, vt, cp.program.declarations)
    at = ft.arg
    a = _eval3(cp, e.arg, interp3, state, vt)
    if isinstance(at, Iota):
        return f[a]
    cands = [f[d] for d in range(domain_size(at, n)) if info_leq(at, a, _two_to_three(at, n, d))]
    return _glb_info(ft.result, cands)


def tp_three_valued(prog, db=None, interp3=None, **kw) -> dict:
    """Three-valued immediate consequence step computed directly from its definition.

    ``interp3`` maps every predicate to a three-valued meaning (or is a
    PairInterp, converted with tau_inv).  Returns the same kind of map.
    """
    cp = interp3.cp if isinstance(interp3, PairInterp) and prog is None \
        else _compiled(prog, db, **kw)
    if isinstance(interp3, PairInterp):
        interp3 = {p: interp3.three_valued(p) for p in cp.preds}
    out = {}
    for p, info in cp.preds.items():
        facts = cp.facts[p]
        rules = [(r, cp.tp.var_types[r.index]) for r in cp.rules_by_pred[p]]
        vals = []
        for idx in range(info.cells):
            args = cell_args(info.type, cp.n, idx)
            best = ThreeVal.TRUE if args in facts else ThreeVal.FALSE
            for r, vt in rules:
                src = cp.tp.rules[r.index]
                free = [v for v in vt if v not in src.head_vars]
                doms = [range(domain_size(vt[v], cp.n)) for v in free]
                for combo in itertools.product(*doms):
                    state = dict(zip(src.head_vars, args))
                    state.update(zip(free, combo))
                    v = ThreeVal.TRUE
                    for lit in src.body:
                        v = min(v, _eval3(cp, lit, interp3, state, vt))
                    best = max(best, v)
            vals.append(best)
        out[p] = _cells_to_structure(info.type, cp.n, vals)
    return out


def _cells_to_structure(t: Type, n: int, vals: list):
    """Flat cell list (cell order) to a nested three-valued structure."""
    if isinstance(t, Bool):
        return vals[0]
    size = domain_size(t.arg, n)
    width = len(vals) // size
    return tuple(_cells_to_structure(t.result, n, vals[d * width:(d + 1) * width])
                 for d in range(size))
