"""Type checking, order computation, existential discovery and stratification."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .errors import TypeCheckError
from .syntax import (BOOL, FALSE, IOTA, App, Arrow, Bool, Eq, IndConst, IndVar, Iota,
                     Not, PredConst, PredVar, Program, Rule, Type, format_expr,
                     format_type, infer_rule_types, pred_type, type_args)


def order_of(t: Type) -> int:
    """order(i)=0, order(o)=1, order(a->r)=max(order(a)+1, order(r))."""
    if isinstance(t, Iota):
        return 0
    if isinstance(t, Bool):
        return 1
    if isinstance(t, Arrow):
        return max(order_of(t.arg) + 1, order_of(t.result))
    raise TypeError(f"not a type: {t!r}")


@dataclass(frozen=True)
class TypedProgram:
    program: Program
    var_types: tuple[dict[str, Type], ...]
    existentials: tuple[tuple[tuple[str, Type], ...], ...]
    expr_types: tuple[dict, ...] = field(repr=False, default=())

    @property
    def declarations(self) -> dict[str, Type]:
        return self.program.declarations

    @property
    def rules(self) -> tuple[Rule, ...]:
        return self.program.rules


def type_of(e, var_types: dict[str, Type], decls: dict[str, Type]) -> Type:
    if isinstance(e, (PredVar, IndVar)):
        return var_types[e.name]
    if isinstance(e, IndConst):
        return IOTA
    if isinstance(e, PredConst):
        return BOOL if e.name == FALSE else decls[e.name]
    if isinstance(e, App):
        t = type_of(e.fun, var_types, decls)
        assert isinstance(t, Arrow)
        return t.result
    if isinstance(e, (Eq, Not)):
        return BOOL
    raise TypeError(e)


def _annotate(e, vt, decls, out: dict):
    out[e] = type_of(e, vt, decls)
    if isinstance(e, App):
        _annotate(e.fun, vt, decls, out)
        _annotate(e.arg, vt, decls, out)
    elif isinstance(e, Eq):
        _annotate(e.lhs, vt, decls, out)
        _annotate(e.rhs, vt, decls, out)
    elif isinstance(e, Not):
        _annotate(e.atom, vt, decls, out)


def _check_kinds(e, vt, index):
    if isinstance(e, IndVar) and not isinstance(vt[e.name], Iota):
        raise TypeCheckError(f"variable {e.name} has type {format_type(vt[e.name])} "
                             "but is marked as an individual variable", index)
    if isinstance(e, PredVar) and isinstance(vt[e.name], Iota):
        raise TypeCheckError(f"variable {e.name} has type i but is marked as a predicate "
                             "variable", index)
    if isinstance(e, Not) and not isinstance(e.atom, (App, PredConst, PredVar, Eq)):
        raise TypeCheckError(f"'not' must wrap an atom: {format_expr(e)}", index)
    if isinstance(e, App):
        if isinstance(e.arg, (Eq, Not)):
            raise TypeCheckError(f"literal used as an argument in {format_expr(e)}", index)
        _check_kinds(e.fun, vt, index)
        _check_kinds(e.arg, vt, index)
    elif isinstance(e, Eq):
        _check_kinds(e.lhs, vt, index)
        _check_kinds(e.rhs, vt, index)
    elif isinstance(e, Not):
        _check_kinds(e.atom, vt, index)


def typecheck(prog: Program, extra_decls: dict[str, Type] | None = None) -> TypedProgram:
    """Infer variable types rule by rule and verify every expression.

    ``extra_decls`` supplies types for predicates that appear only in a
    database (they default to first-order relations in the engine).
    """
    decls = dict(prog.declarations)
    if extra_decls:
        for k, v in extra_decls.items():
            decls.setdefault(k, v)
    var_types = []
    exist = []
    annotations = []
    for i, r in enumerate(prog.rules):
        if len(set(r.head_vars)) != len(r.head_vars):
            dup = next(v for v in r.head_vars if r.head_vars.count(v) > 1)
            raise TypeCheckError(f"head variable {dup} repeated in {r.head}", i)
        vt = infer_rule_types(r.head, r.head_vars, r.body, decls, i, strict=True)
        for lit in r.body:
            _check_kinds(lit, vt, i)
        ann: dict = {}
        for lit in r.body:
            _annotate(lit, vt, decls, ann)
        var_types.append(vt)
        annotations.append(ann)
        head = set(r.head_vars)
        exist.append(tuple((v, t) for v, t in vt.items() if v not in head))
    return TypedProgram(prog, tuple(var_types), tuple(exist), tuple(annotations))


@dataclass(frozen=True)
class OrderReport:
    k: int
    pred_orders: dict[str, int]
    max_var: tuple[str, int, str] | None      # (rule index as str, order, variable)
    max_pred: tuple[str, int] | None

    def __int__(self) -> int:
        return self.k


def classify_order(tp: TypedProgram) -> OrderReport:
    """Smallest k with variables of order <= k-1 and predicates of order <= k."""
    pred_orders = {p: order_of(t) for p, t in tp.declarations.items()}
    max_pred = max(pred_orders.items(), key=lambda kv: kv[1], default=None)
    k = max_pred[1] if max_pred else 0
    max_var = None
    for i, vt in enumerate(tp.var_types):
        for v, t in vt.items():
            o = order_of(t)
            if o + 1 > k:
                k = o + 1
            if max_var is None or o > max_var[1]:
                max_var = (str(i), o, v)
    return OrderReport(k, pred_orders, max_var, max_pred)


def find_existential_pred_vars(rule: Rule, tp: TypedProgram,
                               include_individual: bool = False) -> list[tuple[str, Type]]:
    """Body-only variables of predicate type (and, optionally, of type i)."""
    idx = tp.rules.index(rule)
    out = []
    for v, t in tp.existentials[idx]:
        if isinstance(t, Iota) and not include_individual:
            continue
        out.append((v, t))
    return out


# ------------------------------------------------------- stratification

@dataclass(frozen=True)
class Occurrence:
    pred: str
    strict: bool
    reason: str          # "body", "negation" or "argument"


def literal_occurrences(lit) -> list[Occurrence]:
    out: list[Occurrence] = []

    def walk(e, neg: bool, arg: bool):
        if isinstance(e, PredConst):
            if e.name != FALSE:
                reason = "negation" if neg else ("argument" if arg else "body")
                out.append(Occurrence(e.name, neg or arg, reason))
        elif isinstance(e, App):
            walk(e.fun, neg, arg)
            walk(e.arg, neg, True)
        elif isinstance(e, Eq):
            walk(e.lhs, neg, arg)
            walk(e.rhs, neg, arg)
        elif isinstance(e, Not):
            walk(e.atom, True, arg)

    walk(lit, False, False)
    return out


def dependency_graph(prog: Program) -> nx.DiGraph:
    """Edges q -> p for every occurrence of q in a rule for p.

    Edge attribute ``strict`` is True when some occurrence sits under ``not``
    or inside an application argument; ``witness`` keeps (rule index, literal).
    """
    g = nx.DiGraph()
    g.add_nodes_from(prog.declarations)
    for i, r in enumerate(prog.rules):
        g.add_node(r.head)
        for lit in r.body:
            for occ in literal_occurrences(lit):
                if g.has_edge(occ.pred, r.head):
                    data = g.edges[occ.pred, r.head]
                    if occ.strict and not data["strict"]:
                        data.update(strict=True, witness=(i, lit, occ.reason))
                else:
                    g.add_edge(occ.pred, r.head, strict=occ.strict,
                               witness=(i, lit, occ.reason))
    return g


@dataclass(frozen=True)
class StratificationResult:
    stratified: bool
    strata: dict[str, int] | None
    witness: tuple[int, str, str, str] | None = None   # rule, literal, pred, reason

    def __bool__(self) -> bool:
        return self.stratified


def _program_of(x) -> Program:
    return x.program if isinstance(x, TypedProgram) else x


def stratify(tp: TypedProgram | Program) -> StratificationResult:
    """Canonical stratification (longest strict-path lengths) or a violating literal."""
    prog = _program_of(tp)
    g = dependency_graph(prog)
    comp_of = {}
    sccs = list(nx.strongly_connected_components(g))
    for ci, comp in enumerate(sccs):
        for p in comp:
            comp_of[p] = ci
    for q, p, data in g.edges(data=True):
        if data["strict"] and comp_of[q] == comp_of[p]:
            i, lit, reason = data["witness"]
            return StratificationResult(False, None, (i, format_expr(lit), q, reason))
    cond = nx.condensation(g, sccs)
    level = {c: 0 for c in cond.nodes}
    for c in nx.topological_sort(cond):
        for p in sccs[c]:
            for q in g.predecessors(p):
                cq = comp_of[q]
                if cq == c:
                    continue
                w = 1 if g.edges[q, p]["strict"] else 0
                level[c] = max(level[c], level[cq] + w)
    strata = {p: level[comp_of[p]] for p in g.nodes}
    return StratificationResult(True, strata)


def check_stratification(prog: Program, strata: dict[str, int]) -> list[str]:
    """Re-check the three stratification conditions for a given map; returns violations."""
    problems = []
    for i, r in enumerate(prog.rules):
        sp = strata.get(r.head, 0)
        for lit in r.body:
            for occ in literal_occurrences(lit):
                sq = strata.get(occ.pred, 0)
                if occ.strict and not sq < sp:
                    problems.append(f"rule {i}: {occ.pred} ({occ.reason}) not below {r.head}")
                elif not occ.strict and not sq <= sp:
                    problems.append(f"rule {i}: {occ.pred} above {r.head}")
    return problems


def _is_choice_rule(r: Rule, block: set[str]) -> bool:
    if not r.body:
        return True
    for lit in r.body:
        if not isinstance(lit, Not):
            # guards over predicates outside the block are allowed
            if any(o.pred in block for o in literal_occurrences(lit)):
                return False
            continue
        occ = literal_occurrences(lit.atom)
        if not occ or occ[0].pred not in block:
            return False
        if any(o.strict for o in occ):
            return False
    return True


@dataclass(frozen=True)
class ChoiceAnalysis:
    candidate: bool
    choice_preds: frozenset[str]
    reason: str = ""


def choice_block(tp: TypedProgram | Program) -> ChoiceAnalysis:
    """Detect the Stratified+Choices shape: mutually negated choice rules plus a
    remainder that stratifies once the choice predicates are treated as given."""
    prog = _program_of(tp)
    g = dependency_graph(prog)
    sccs = list(nx.strongly_connected_components(g))
    chosen: set[str] = set()
    for comp in sccs:
        internal_strict = any(g.edges[q, p]["strict"] for q in comp for p in comp
                              if g.has_edge(q, p))
        if not internal_strict:
            continue
        for r in prog.rules:
            if r.head in comp and not _is_choice_rule(r, comp):
                return ChoiceAnalysis(False, frozenset(),
                                      f"rule for {r.head} in an unstratified cycle is not a choice rule")
        chosen |= comp
    rest = Program(prog.declarations, tuple(r for r in prog.rules if r.head not in chosen),
                   prog.constants, prog.allow_reserved)
    res = stratify(rest)
    if not res.stratified:
        return ChoiceAnalysis(False, frozenset(chosen), "remainder is not stratified")
    return ChoiceAnalysis(True, frozenset(chosen))


def first_order_type(arity: int) -> Type:
    return pred_type(*([IOTA] * arity))


def is_first_order_pred(t: Type) -> bool:
    return all(isinstance(a, Iota) for a in type_args(t))
