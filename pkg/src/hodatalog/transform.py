"""Elimination of existential predicate variables.

A rule ``p(X) :- B[X, R]`` whose body-only variable ``R`` has predicate
type is replaced by a search that starts from the empty relation and adds
one tuple at a time::

    p(X) :- test(X, empty).
    test(X, R) :- B[X, R].
    test(X, R) :- test(X, add(R, Z1, ..., Zn)).

with shared helper predicates ``empty``, ``add``, ``eq`` and ``neq`` per
type.  All generated names start with ``__`` so they cannot clash with user
predicates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import TypedProgram, order_of, typecheck
from .errors import TransformError
from .syntax import (BOOL, IOTA, App, Arrow, Bool, Eq, IndVar, Iota, Not, PredConst,
                     PredVar, Program, Rule, Type, expr_vars, make_program, mk_app,
                     pred_type, type_args)


@dataclass(frozen=True)
class TransformStep:
    rule_index: int
    var: str
    var_type: Type
    test: str
    generated: tuple[str, ...]


def type_tag(t: Type) -> str:
    """Identifier-safe rendering of a type: i->i->o becomes i_i_o."""
    if isinstance(t, Iota):
        return "i"
    if isinstance(t, Bool):
        return "o"
    a = type_tag(t.arg)
    if isinstance(t.arg, Arrow):
        a = "L" + a + "R"
    return a + "_" + type_tag(t.result)


def _var(name: str, t: Type):
    return IndVar(name) if isinstance(t, Iota) else PredVar(name)


def _fresh(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def _subst(e, name: str, repl):
    if isinstance(e, PredVar) and e.name == name:
        return repl
    if isinstance(e, App):
        return App(_subst(e.fun, name, repl), _subst(e.arg, name, repl))
    if isinstance(e, Eq):
        return Eq(_subst(e.lhs, name, repl), _subst(e.rhs, name, repl))
    if isinstance(e, Not):
        return Not(_subst(e.atom, name, repl))
    return e


class _Builder:
    """Accumulates declarations and helper rules for one program."""

    def __init__(self, prog: Program):
        self.decls = dict(prog.declarations)
        self.helpers: list[Rule] = []

    def _ensure(self, name: str, t: Type) -> bool:
        """Declare ``name``; False if it already exists with the same type."""
        old = self.decls.get(name)
        if old is not None:
            if old != t:
                raise TransformError(f"generated name {name} already used with another type")
            return False
        self.decls[name] = t
        return True

    def empty(self, t: Type) -> str:
        name = f"__empty_{type_tag(t)}"
        if self._ensure(name, t):
            ys = [_var(f"Y{i + 1}", a) for i, a in enumerate(type_args(t))]
            self.helpers.append(Rule(name, tuple(y.name for y in ys), (PredConst("false"),)))
        return name

    def eq(self, t: Type) -> list[str]:
        """Names generated for equality on ``t`` (eq, plus neq for predicate types)."""
        name = f"__eq_{type_tag(t)}"
        made = [name]
        if isinstance(t, Iota):
            if self._ensure(name, pred_type(IOTA, IOTA)):
                self.helpers.append(Rule(name, ("Z", "Y"), (Eq(IndVar("Z"), IndVar("Y")),)))
            return made
        neq = f"__neq_{type_tag(t)}"
        made.append(neq)
        if self._ensure(name, pred_type(t, t)):
            self._ensure(neq, pred_type(t, t))
            z, y = PredVar("Z"), PredVar("Y")
            self.helpers.append(Rule(name, ("Z", "Y"), (Not(mk_app(PredConst(neq), [z, y])),)))
            xs = [_var(f"X{i + 1}", a) for i, a in enumerate(type_args(t))]
            self.helpers.append(Rule(neq, ("Z", "Y"), (mk_app(z, xs), Not(mk_app(y, xs)))))
            self.helpers.append(Rule(neq, ("Z", "Y"), (Not(mk_app(z, xs)), mk_app(y, xs))))
        return made

    def add(self, t: Type) -> list[str]:
        name = f"__add_{type_tag(t)}"
        args = type_args(t)
        made = [name]
        for a in args:
            made.extend(self.eq(a))
        if self._ensure(name, pred_type(t, *args, *args)):
            zs = [_var(f"Z{i + 1}", a) for i, a in enumerate(args)]
            ys = [_var(f"Y{i + 1}", a) for i, a in enumerate(args)]
            head = ("R",) + tuple(z.name for z in zs) + tuple(y.name for y in ys)
            self.helpers.append(Rule(name, head, (mk_app(PredVar("R"), ys),)))
            body = tuple(mk_app(PredConst(f"__eq_{type_tag(a)}"), [z, y])
                         for a, z, y in zip(args, zs, ys))
            self.helpers.append(Rule(name, head, body))
        return made


def _as_typed(prog) -> TypedProgram:
    return prog if isinstance(prog, TypedProgram) else typecheck(prog)


def eliminate_existential(prog: Program | TypedProgram, rule, var: str,
                          proof_form: bool = False) -> Program:
    """Replace one existential predicate variable of one rule (given by index or Rule)."""
    return _eliminate(prog, rule, var, proof_form)[0]


def _eliminate(prog, rule, var, proof_form):
    tp = _as_typed(prog)
    program = tp.program
    idx = rule if isinstance(rule, int) else program.rules.index(rule)
    if not 0 <= idx < len(program.rules):
        raise TransformError(f"no rule with index {idx}")
    r = program.rules[idx]
    vt = tp.var_types[idx]
    if var in r.head_vars:
        raise TransformError(f"variable {var} occurs in the head of rule {idx}")
    t = vt.get(var)
    if t is None:
        raise TransformError(f"variable {var} does not occur in rule {idx}")
    if isinstance(t, Iota):
        raise TransformError(f"variable {var} of rule {idx} is not a predicate variable")
    b = _Builder(program)
    body = r.body
    taken = set(vt)
    if isinstance(t, Bool):
        # a truth-valued existential R becomes R(W) with R : i -> o
        w = _fresh("W", taken)
        taken.add(w)
        body = tuple(_subst(lit, var, App(PredVar(var), IndVar(w))) for lit in body)
        t = pred_type(IOTA)
    test = _fresh(f"__test_{idx}_{var}", b.decls)
    xs = [_var(x, vt[x]) for x in r.head_vars]
    test_type = pred_type(*[vt[x] for x in r.head_vars], t)
    b.decls[test] = test_type
    empty = b.empty(t)
    generated = [test, empty]
    generated.extend(b.add(t))
    zs = []
    for i, a in enumerate(type_args(t)):
        z = _fresh(f"Z{i + 1}", taken)
        taken.add(z)
        zs.append(_var(z, a))
    rv = PredVar(var)
    new_rules = [
        Rule(r.head, r.head_vars, (mk_app(PredConst(test), xs + [PredConst(empty)]),)),
        Rule(test, r.head_vars + (var,), body),
    ]
    if proof_form:
        new_rules.append(Rule(test, r.head_vars + (var,),
                              (mk_app(PredConst(test), xs + [rv]),)))
    new_rules.append(Rule(test, r.head_vars + (var,),
                          (mk_app(PredConst(test),
                                  xs + [mk_app(PredConst(f"__add_{type_tag(t)}"), [rv] + zs)]),)))
    rules = list(program.rules[:idx]) + new_rules + list(program.rules[idx + 1:]) + b.helpers
    out = make_program(b.decls, rules, allow_reserved=True)
    seen = []
    for g in generated:
        if g not in seen:
            seen.append(g)
    return out, TransformStep(idx, var, vt[var], test, tuple(seen))


def existential_pred_vars(tp: TypedProgram) -> list[tuple[int, str, Type]]:
    """(rule index, variable, type) for every body-only predicate variable, in textual order."""
    out = []
    for i, r in enumerate(tp.rules):
        order = []
        for lit in r.body:
            for v in expr_vars(lit):
                if v not in order:
                    order.append(v)
        ex = dict(tp.existentials[i])
        for v in order:
            t = ex.get(v)
            if t is not None and not isinstance(t, Iota):
                out.append((i, v, t))
    return out


def eliminate_all_report(prog: Program | TypedProgram, proof_form: bool = False
                         ) -> tuple[Program, list[list[TransformStep]]]:
    """Eliminate every existential predicate variable, highest order first.

    Returns the final program and the steps grouped by pass; each pass
    removes all existentials of the current maximal order (new ones of that
    order created along the way included).
    """
    tp = _as_typed(prog)
    passes: list[list[TransformStep]] = []
    while True:
        ex = existential_pred_vars(tp)
        if not ex:
            break
        top = max(order_of(t) for _, _, t in ex)
        steps = []
        while True:
            ex = [e for e in existential_pred_vars(tp) if order_of(e[2]) == top]
            if not ex:
                break
            i, v, _ = ex[0]
            prog2, step = _eliminate(tp, i, v, proof_form)
            steps.append(step)
            tp = typecheck(prog2)
        passes.append(steps)
    return tp.program, passes


def eliminate_all(prog: Program | TypedProgram, proof_form: bool = False) -> Program:
    return eliminate_all_report(prog, proof_form)[0]


def project_interp(interp, vocabulary):
    """Restrict an interpretation or model to the given predicate names."""
    vocabulary = tuple(vocabulary)
    have = set(interp.predicates) if hasattr(interp, "predicates") else set(interp)
    missing = [p for p in vocabulary if p not in have]
    if missing:
        raise TransformError(f"predicates not in the interpretation: {', '.join(missing)}")
    return interp.restrict(vocabulary)


def verify_equivalence(original, transformed, db=None, vocabulary=None,
                       stable: bool = False, **kw) -> list[str]:
    """Compare projected models of two programs on one database.

    Returns a list of differences (empty when equivalent).  With ``stable``
    the projected stable-model sets are compared as well.
    """
    from .engine import _compiled, stable_models, well_founded_model
    cp1 = _compiled(original, db, **kw)
    cp2 = _compiled(transformed, db, **kw)
    vocab = tuple(vocabulary) if vocabulary is not None else tuple(cp1.preds)
    diffs = []
    m1 = well_founded_model(cp1).to_pair(vocab)
    m2 = well_founded_model(cp2).to_pair(vocab)
    for p in vocab:
        if m1.lo.codes[p] != m2.lo.codes[p] or m1.hi.codes[p] != m2.hi.codes[p]:
            diffs.append(f"well-founded value of {p} differs")
    if stable:
        s1 = {_project_codes(m, vocab) for m in stable_models(cp1)}
        s2 = {_project_codes(m, vocab) for m in stable_models(cp2)}
        if s1 != s2:
            diffs.append(f"stable models differ ({len(s1)} vs {len(s2)} after projection)")
    return diffs


def _project_codes(model, vocab) -> tuple:
    if hasattr(model, "to_interp"):
        model = model.to_interp(vocab)
    return tuple((p, model.codes[p]) for p in vocab)
