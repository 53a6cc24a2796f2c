"""Command-line front end: ``hodl <subcommand> ...``.

Exit codes: 0 success (or query true), 1 query false/undefined or a failed
check, 2 input error (parse, type, bad arguments), 3 domain explosion,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .analysis import (choice_block, classify_order, is_first_order_pred, order_of, stratify,
                       typecheck)
from .domains import DEFAULT_LIMIT, ThreeVal
from .engine import _arg_codes, _compiled, stable_models, well_founded_model
from .errors import BudgetExceeded, DomainExplosion, HodlError
from .genlib import (format_tm, gen_counter, gen_ordering_module, gen_tm_simulation, parse_tm,
                     run_counter)
from .syntax import format_program, format_type, parse_atom, parse_database, parse_program
from .transform import eliminate_all_report, existential_pred_vars, verify_equivalence

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2, 3, 4

MODES = {"wfs": "wfs", "stable-cautious": "cautious", "stable-brave": "brave"}


class _Out:
    """Text or line-delimited JSON records on stdout."""

    def __init__(self, structured: bool, stream=None):
        self.structured = structured
        self.stream = stream or sys.stdout

    def text(self, line: str):
        if not self.structured:
            print(line, file=self.stream)

    def record(self, **fields):
        if self.structured:
            print(json.dumps(fields, sort_keys=True), file=self.stream)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise HodlError(f"cannot read {path}: {e.strerror}") from None


def _load(args):
    prog = parse_program(_read(args.program))
    tp = typecheck(prog)
    db = parse_database(_read(args.database)) if getattr(args, "database", None) else None
    return tp, db


def _limit(args) -> int:
    if args.limit is not None:
        return args.limit
    env = os.environ.get("HODL_LIMIT")
    if env:
        try:
            return int(env)
        except ValueError:
            raise HodlError(f"HODL_LIMIT must be an integer, got {env!r}") from None
    return DEFAULT_LIMIT


def _write(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _atom_text(p: str, args) -> str:
    return f"{p}({','.join(str(a) for a in args)})" if args else p


def _output_preds(tp, dump_ho: bool) -> list[str]:
    """Predicates with rules, first-order ones unless ``dump_ho``."""
    heads = []
    for r in tp.program.rules:
        if r.head not in heads:
            heads.append(r.head)
    decl = tp.program.declarations
    return [p for p in heads if dump_ho or is_first_order_pred(decl[p])]


# ---------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    tp, db = _load(args)
    out = _Out(args.format == "structured")
    cp = _compiled(tp, db, limit=_limit(args))
    mode = MODES[args.mode]
    preds = _output_preds(tp, args.dump_ho)

    if mode == "wfs":
        model = well_founded_model(cp, budget=args.budget)
        if args.query:
            p, qargs = parse_atom(args.query)
            v = model.value(p, qargs)
            out.text(f"{_atom_text(p, qargs)}: {v}")
            out.record(atom=_atom_text(p, qargs), value=str(v))
            return EXIT_TRUE if v == ThreeVal.TRUE else EXIT_FALSE
        for p in preds:
            for a, v in model.atoms(p):
                out.text(f"{'' if v == ThreeVal.TRUE else 'u '}{_atom_text(p, a)}")
                out.record(atom=_atom_text(p, a), value=str(v))
        return EXIT_TRUE

    models = stable_models(cp, strategy=args.strategy, budget=args.budget)
    if args.all_models:
        for i, m in enumerate(models):
            out.text(f"% model {i + 1}")
            for p in preds:
                for a in m.true_atoms(p):
                    out.text(_atom_text(p, a))
                    out.record(atom=_atom_text(p, a), value="true", model_index=i)
    out.text(f"% {len(models)} stable model{'s' if len(models) != 1 else ''}")
    if args.query:
        p, qargs = parse_atom(args.query)
        key = _arg_codes(cp, p, qargs)
        hits = [m.value(p, key) == ThreeVal.TRUE for m in models]
        if mode == "brave":
            ok = any(hits)
        else:
            if not models:
                warnings.warn("no stable models: cautious answer reported as false")
            ok = bool(models) and all(hits)
        out.text(f"{_atom_text(p, qargs)}: {'true' if ok else 'false'} ({mode})")
        out.record(atom=_atom_text(p, qargs), value="true" if ok else "false", mode=mode)
        return EXIT_TRUE if ok else EXIT_FALSE
    if not args.all_models:
        for p in preds:
            sets = [set(m.true_atoms(p)) for m in models]
            if mode == "brave":
                chosen = set().union(*sets) if sets else set()
            else:
                chosen = set.intersection(*sets) if sets else set()
            for a in sorted(chosen, key=lambda t: tuple(str(x) for x in t)):
                out.text(_atom_text(p, a))
                out.record(atom=_atom_text(p, a), value="true", mode=mode)
    return EXIT_TRUE


# ---------------------------------------------------------------- check

def cmd_check(args) -> int:
    tp, _ = _load(args)
    out = _Out(args.format == "structured")
    k = classify_order(tp).k
    strat = stratify(tp)
    ex = existential_pred_vars(tp)
    decl = tp.program.declarations
    orders = {p: order_of(t) for p, t in decl.items()}
    if strat.stratified:
        out.text(f"order {k}, stratified")
        n_strata = max(strat.strata.values(), default=-1) + 1
        out.text(f"strata: {n_strata}")
        for s in range(n_strata):
            names = sorted(p for p, v in strat.strata.items() if v == s)
            out.text(f"  {s}: {' '.join(names)}")
        cand = None
    else:
        i, lit, pred, reason = strat.witness
        ca = choice_block(tp)
        cand = ca.candidate
        out.text(f"order {k}, unstratified; Stratified+Choices candidate: {'yes' if cand else 'no'}")
        out.text(f"  rule {i}: {lit} ({reason} on {pred})")
        if cand:
            out.text(f"  choice predicates: {' '.join(sorted(ca.choice_preds))}")
    out.text("predicate orders:")
    width = max((len(p) for p in decl), default=0)
    for p, t in decl.items():
        out.text(f"  {p:<{width}}  {orders[p]}  {format_type(t)}")
    out.text(f"existential predicate variables: {len(ex)}")
    for i, v, t in ex:
        out.text(f"  rule {i}: {v} : {t}")
    out.record(order=k, stratified=strat.stratified, choice_candidate=cand,
               strata=strat.strata, orders=orders, existentials=[[i, v, str(t)] for i, v, t in ex])
    return EXIT_TRUE


# ------------------------------------------------------------ transform

def cmd_transform(args) -> int:
    tp, _ = _load(args)
    new, passes = eliminate_all_report(tp, proof_form=args.proof_form)
    header = "transformed: existential predicate variables removed"
    if not passes:
        new = tp.program
    _write(args, format_program(new, header=header))
    report = sys.stdout if args.output else sys.stderr
    print(f"% {len(passes)} pass{'es' if len(passes) != 1 else ''}", file=report)
    for n, steps in enumerate(passes, 1):
        names = ", ".join(f"{s.var} (rule {s.rule_index}, {s.var_type})" for s in steps)
        print(f"% pass {n}: {names}", file=report)
    if args.verify:
        db = parse_database(_read(args.verify))
        vocab = tuple(tp.program.declarations)
        diffs = verify_equivalence(tp, new, db, vocabulary=vocab, limit=_limit(args))
        if diffs:
            for d in diffs:
                print(f"% {d}", file=report)
            return EXIT_FALSE
        print("% equivalent on 1 database", file=report)
    return EXIT_TRUE


# ------------------------------------------------------------ generators

def cmd_gen_tm(args) -> int:
    tm = parse_tm(_read(args.tm))
    prog = gen_tm_simulation(tm, args.k, args.d, nondet=args.nondet, absorbing=args.absorbing)
    head = f"machine simulation, k={args.k}, d={args.d}\n" + format_tm(tm).rstrip()
    _write(args, format_program(prog, header=head))
    return EXIT_TRUE


def cmd_gen_counter(args) -> int:
    prog = gen_counter(args.k, args.d)
    _write(args, format_program(prog, header=f"order-{args.k} counter, d={args.d}"))
    if args.selftest:
        run = run_counter(args.k, args.d, args.n, limit=_limit(args))
        ok = run.ok()
        print(f"% selftest n={args.n}: chain length {len(run.chain)}, "
              f"expected {run.expected_length}: {'ok' if ok else 'FAILED'}",
              file=sys.stdout if args.output else sys.stderr)
        return EXIT_TRUE if ok else EXIT_FALSE
    return EXIT_TRUE


def cmd_gen_ordering(args) -> int:
    _write(args, format_program(gen_ordering_module(), header="ordering module"))
    return EXIT_TRUE


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hodl", description="Higher-order Datalog with negation")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, db=True):
        p.add_argument("program")
        if db:
            p.add_argument("database", nargs="?")
        p.add_argument("--limit", type=int, default=None,
                       help="domain element limit (default: $HODL_LIMIT or 2^20)")
        p.add_argument("--format", choices=("text", "structured"), default="text")

    e = sub.add_parser("eval", help="evaluate a program on a database")
    common(e)
    e.add_argument("--mode", choices=tuple(MODES), default="wfs")
    e.add_argument("--query")
    e.add_argument("--all-models", action="store_true")
    e.add_argument("--budget", type=int, default=None)
    e.add_argument("--strategy", choices=("auto", "exhaustive", "choice-guided"), default="auto")
    e.add_argument("--dump-ho", action="store_true", help="also print higher-order relations")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="order, stratification and existential variables")
    common(c, db=False)
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("transform", help="remove existential predicate variables")
    common(t, db=False)
    t.add_argument("--proof-form", action="store_true")
    t.add_argument("--verify", metavar="DATABASE")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_transform)

    g = sub.add_parser("gen-tm", help="Turing machine simulation program")
    g.add_argument("--tm", required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--nondet", choices=("cautious", "brave"))
    g.add_argument("--absorbing", action="store_true", help="self loops on final states")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen_tm)

    gc = sub.add_parser("gen-counter", help="counter program of order k")
    gc.add_argument("--k", type=int, default=1)
    gc.add_argument("--d", type=int, default=0)
    gc.add_argument("--n", type=int, default=2, help="universe size for --selftest")
    gc.add_argument("--selftest", action="store_true")
    gc.add_argument("--limit", type=int, default=None)
    gc.add_argument("-o", "--output")
    gc.set_defaults(func=cmd_gen_counter)

    go = sub.add_parser("gen-ordering", help="the ordering module")
    go.add_argument("-o", "--output")
    go.set_defaults(func=cmd_gen_ordering)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainExplosion as e:
        print(f"hodl: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExceeded as e:
        print(f"hodl: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except HodlError as e:
        print(f"hodl: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
