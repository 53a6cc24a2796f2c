"""Program generators and a Turing machine interpreter.

The generators emit the standard program families: the ordering module,
counters over tuples of individuals (order 0) and over relations (order
k >= 1), the lift from tuple numbers to order-k numbers, the input tape
encoding and full Turing machine simulations.  Every generator returns a
:class:`~hodatalog.syntax.Program` carrying its own declarations, so pieces
can be glued with :func:`combine`.

Numbers of order 0 are (d+1)-tuples of individuals, least significant
first.  An order-1 number is a relation over such tuples read as a bit
vector, an order-(j+1) number a relation over order-j numbers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .domains import DEFAULT_LIMIT, HUGE
from .errors import DomainExplosion, GeneratorError
from .syntax import Program, make_program, parse_program

BLANK = "_"
SYMBOLS = ("0", "1", BLANK)
MOVES = ("L", "R", "S")
ORD_T = "(i -> i -> o)"

_SYM_NAME = {"0": "0", "1": "1", BLANK: "b"}
_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_]*\Z")


def exp_k(k: int, x: int) -> int:
    """Iterated exponential: exp_0(x) = x, exp_{k+1}(x) = 2 ** exp_k(x)."""
    for _ in range(k):
        x = 2 ** x
    return x


# ------------------------------------------------------------ helpers

class _Module:
    """Declarations plus rule text, parsed into a Program on demand."""

    def __init__(self):
        self.decls: dict[str, str] = {}
        self.lines: list[str] = []

    def pred(self, name: str, *args: str):
        t = " -> ".join(list(args) + ["o"])
        old = self.decls.setdefault(name, t)
        if old != t:
            raise GeneratorError(f"predicate {name} declared with two types")

    def rule(self, head: str, *body: str):
        self.lines.append(f"{head}:-{','.join(body)}." if body else f"{head}.")

    def text(self) -> str:
        out = [f"#pred {n} : {t}." for n, t in self.decls.items()]
        return "\n".join(out + self.lines) + "\n"

    def program(self) -> Program:
        return parse_program(self.text())


def combine(*parts: Program) -> Program:
    """Union of program fragments; shared predicates must agree on their type."""
    decls: dict = {}
    rules = []
    seen = set()
    for p in parts:
        for n, t in p.declarations.items():
            if decls.setdefault(n, t) != t:
                raise GeneratorError(f"predicate {n} has conflicting types")
        for r in p.rules:
            if r not in seen:
                seen.add(r)
                rules.append(r)
    return make_program(decls, rules, allow_reserved=any(p.allow_reserved for p in parts))


def _tup(prefix: str, d: int) -> str:
    return ",".join(f"{prefix}{i}" for i in range(d + 1))


def _itup(d: int) -> list[str]:
    return ["i"] * (d + 1)


def number_type(k: int, d: int) -> str:
    """Type of an order-k number (k >= 1) over (d+1)-tuples."""
    t = " -> ".join(_itup(d) + ["o"])
    for _ in range(k - 1):
        t = f"({t}) -> o"
    return t


def _num_args(k: int, d: int) -> list[str]:
    """Argument type list standing for one order-k number (k >= 0)."""
    return _itup(d) if k == 0 else [f"({number_type(k, d)})"]


def _nv(k: int, d: int, name: str) -> str:
    """A variable (or variable tuple when k = 0) holding an order-k number."""
    return _tup(name, d) if k == 0 else name


# ------------------------------------------------------------ ordering

def _ordering(m: _Module):
    rel = ORD_T
    for p in ("ordering", "connected", "disconnected", "transitive", "non_transitive",
              "irreflexive", "non_irreflexive"):
        m.pred(p, rel)
    for p in ("first", "nfirst", "last", "nlast"):
        m.pred(p, rel, "i")
    m.pred("succ", rel, "i", "i")
    m.pred("nsequential", rel, "i", "i")
    m.pred("subset", rel, rel)
    m.pred("nonsubset", rel, rel)
    m.rule("ordering(Ord)", "connected(Ord)", "transitive(Ord)", "irreflexive(Ord)")
    m.rule("connected(Ord)", "not disconnected(Ord)")
    m.rule("disconnected(Ord)", "not Ord(X,Y)", "not Ord(Y,X)", "not(X=Y)")
    m.rule("transitive(Ord)", "not non_transitive(Ord)")
    m.rule("non_transitive(Ord)", "Ord(X,Y)", "Ord(Y,Z)", "not Ord(X,Z)")
    m.rule("irreflexive(Ord)", "not non_irreflexive(Ord)")
    m.rule("non_irreflexive(Ord)", "Ord(X,X)")
    m.rule("first(Ord,X)", "not nfirst(Ord,X)")
    m.rule("nfirst(Ord,X)", "Ord(Z,X)")
    m.rule("last(Ord,X)", "not nlast(Ord,X)")
    m.rule("nlast(Ord,X)", "Ord(X,Y)")
    m.rule("succ(Ord,X,Y)", "Ord(X,Y)", "not nsequential(Ord,X,Y)")
    m.rule("nsequential(Ord,X,Y)", "Ord(X,Z)", "Ord(Z,Y)")
    # inclusion only: with the converse clause subset would mean equality
    m.rule("subset(P,Q)", "not nonsubset(P,Q)")
    m.rule("nonsubset(P,Q)", "P(X,Y)", "not Q(X,Y)")


def gen_ordering_module() -> Program:
    """Strict total orders plus first/last/succ and binary relation inclusion."""
    m = _Module()
    _ordering(m)
    return m.program()


def gen_hamilton() -> Program:
    """Hamilton paths over the edge relation ``e`` via an existential order."""
    m = _Module()
    m.pred("hamilton", "i", "i")
    m.pred("e", "i", "i")
    m.rule("hamilton(X,Y)", "ordering(Ord)", "first(Ord,X)", "last(Ord,Y)", "subset(succ(Ord),e)")
    _ordering(m)
    return m.program()


# ------------------------------------------------------------ counters

def _base_counter(m: _Module, d: int):
    w = _itup(d)
    m.pred("first_0", ORD_T, *w)
    m.pred("last_0", ORD_T, *w)
    for p in ("lt_0", "succ_0", "nsequential_0"):
        m.pred(p, ORD_T, *w, *w)
    xs, ys, zs = _tup("X", d), _tup("Y", d), _tup("Z", d)
    m.rule(f"first_0(Ord,{xs})", *[f"first(Ord,X{i})" for i in range(d + 1)])
    m.rule(f"last_0(Ord,{xs})", *[f"last(Ord,X{i})" for i in range(d + 1)])
    # most significant position first: X_d decides unless equal, and so on
    for j in range(d, -1, -1):
        m.rule(f"lt_0(Ord,{xs},{ys})", f"Ord(X{j},Y{j})",
               *[f"(X{i}=Y{i})" for i in range(j + 1, d + 1)])
    m.rule(f"succ_0(Ord,{xs},{ys})", f"lt_0(Ord,{xs},{ys})", f"not nsequential_0(Ord,{xs},{ys})")
    m.rule(f"nsequential_0(Ord,{xs},{ys})", f"lt_0(Ord,{xs},{zs})", f"lt_0(Ord,{zs},{ys})")


def gen_base_counter(d: int) -> Program:
    """Counter over (d+1)-tuples: numbers 0 .. n^(d+1) - 1, with the ordering module."""
    if d < 0:
        raise GeneratorError("d must be non-negative")
    m = _Module()
    _ordering(m)
    _base_counter(m, d)
    return m.program()


def _ho_counter(m: _Module, k: int, d: int):
    j = k - 1
    num = f"({number_type(k, d)})"
    low = _num_args(j, d)
    x, y = _nv(j, d, "X"), _nv(j, d, "Y")
    for p in ("first", "nfirst", "last", "nlast"):
        m.pred(f"{p}_{k}", ORD_T, num)
    for p in ("lt", "succ", "nsequential"):
        m.pred(f"{p}_{k}", ORD_T, num, num)
    m.pred(f"bit_{k}", ORD_T, num, num, *low)
    m.rule(f"first_{k}(Ord,N)", f"not nfirst_{k}(Ord,N)")
    m.rule(f"nfirst_{k}(Ord,N)", f"N({x})")
    m.rule(f"last_{k}(Ord,N)", f"not nlast_{k}(Ord,N)")
    m.rule(f"nlast_{k}(Ord,N)", f"not N({x})")
    m.rule(f"lt_{k}(Ord,N,M)", f"last_{j}(Ord,{x})", f"bit_{k}(Ord,N,M,{x})")
    m.rule(f"bit_{k}(Ord,N,M,{x})", f"not N({x})", f"M({x})")
    m.rule(f"bit_{k}(Ord,N,M,{x})", f"N({x})", f"M({x})", f"succ_{j}(Ord,{y},{x})",
           f"bit_{k}(Ord,N,M,{y})")
    m.rule(f"bit_{k}(Ord,N,M,{x})", f"not N({x})", f"not M({x})", f"succ_{j}(Ord,{y},{x})",
           f"bit_{k}(Ord,N,M,{y})")
    m.rule(f"succ_{k}(Ord,N,M)", f"lt_{k}(Ord,N,M)", f"not nsequential_{k}(Ord,N,M)")
    m.rule(f"nsequential_{k}(Ord,N,M)", f"lt_{k}(Ord,N,Z)", f"lt_{k}(Ord,Z,M)")


def gen_ho_counter(k: int, d: int = 0) -> Program:
    """Order-k counter built on the order-(k-1) one; includes all lower levels."""
    if k < 1:
        raise GeneratorError("higher-order counters start at k = 1")
    if d < 0:
        raise GeneratorError("d must be non-negative")
    m = _Module()
    _ordering(m)
    _base_counter(m, d)
    for j in range(1, k + 1):
        _ho_counter(m, j, d)
    return m.program()


def gen_counter(k: int, d: int = 0) -> Program:
    """All counter levels 0..k over (d+1)-tuples."""
    return gen_base_counter(d) if k == 0 else gen_ho_counter(k, d)


def _lift(m: _Module, k: int, d: int):
    num = f"({number_type(k, d)})"
    m.pred(f"lift_{k}", ORD_T, *_itup(d), num)
    xs, zs = _tup("X", d), _tup("Z", d)
    m.rule(f"lift_{k}(Ord,{xs},M)", f"first_0(Ord,{xs})", f"first_{k}(Ord,M)")
    m.rule(f"lift_{k}(Ord,{xs},M)", f"succ_0(Ord,{zs},{xs})", f"succ_{k}(Ord,M1,M)",
           f"lift_{k}(Ord,{zs},M1)")


def gen_lift(k: int, d: int = 0) -> Program:
    """lift_k maps a tuple number to the equal order-k number (with counters 0..k)."""
    if k < 1:
        raise GeneratorError("lift needs k >= 1")
    m = _Module()
    _ordering(m)
    _base_counter(m, d)
    for j in range(1, k + 1):
        _ho_counter(m, j, d)
    _lift(m, k, d)
    return m.program()


def _input(m: _Module, d: int):
    w = ["i", "i", ORD_T] + _itup(d)
    m.pred("in", "i", "i")
    m.pred("input_0", *w)
    m.pred("input_1", *w)
    rest = [f"first(Ord,Z{i})" for i in range(3, d + 1)]
    zs = _tup("Z", d)
    firsts = [f"first(Ord,Z{i})" for i in range(2, d + 1)]
    tail = ",".join(f"Z{i}" for i in range(2, d + 1))
    m.rule(f"input_1(A,B,Ord,X,Y,{tail})", *firsts, "in(X,Y)")
    m.rule(f"input_0(A,B,Ord,X,Y,{tail})", *firsts, "not in(X,Y)")
    mark = ["first(Ord,Z)", "succ(Ord,Z,Z2)"] + rest
    m.rule(f"input_1(A,B,Ord,{zs})", "(Z0=A)", "(Z1=B)", *mark)
    m.rule(f"input_0(A,B,Ord,{zs})", "not(Z0=A)", *mark)
    m.rule(f"input_0(A,B,Ord,{zs})", "not(Z1=B)", *mark)


def gen_input_encoding(d: int) -> Program:
    """Tape contents at time 0: the graph ``in`` then the (A,B) marker block."""
    if d < 2:
        raise GeneratorError("the input encoding needs d >= 2 (positions Z2..Zd)")
    m = _Module()
    _ordering(m)
    _input(m, d)
    return m.program()


def gen_choice_rules(tag: str, m: int, domain_type: str = "i") -> Program:
    """``m`` mutually exclusive predicates b_<tag>_1 .. b_<tag>_m over one argument."""
    if m < 1:
        raise GeneratorError("a choice needs at least one alternative")
    mod = _Module()
    names = [f"b_{tag}_{i}" for i in range(1, m + 1)]
    for n in names:
        mod.pred(n, domain_type if domain_type in ("i",) else f"({domain_type})")
    for i in range(m - 1, -1, -1):
        mod.rule(f"{names[i]}(T)", *[f"not {names[j]}(T)" for j in range(m) if j != i])
    return mod.program()


# ------------------------------------------------------------ Turing machines

@dataclass(frozen=True)
class TMSpec:
    """A one-tape machine over {0, 1, _}; ``transitions`` maps (state, symbol) to moves."""

    start: str
    accept: str
    reject: str
    transitions: Mapping[tuple[str, str], tuple[tuple[str, str, str], ...]]
    states: tuple[str, ...] = field(default=())

    def __post_init__(self):
        trans = {k: tuple(tuple(x) for x in v) for k, v in self.transitions.items()}
        object.__setattr__(self, "transitions", trans)
        st = [self.start, self.accept, self.reject]
        for (s, a), outs in trans.items():
            st.append(s)
            st.extend(o[0] for o in outs)
        seen = list(dict.fromkeys(list(self.states) + st))
        object.__setattr__(self, "states", tuple(seen))
        self.validate()

    def validate(self):
        if self.accept == self.reject:
            raise GeneratorError("accept and reject states must differ")
        for s in self.states:
            if not _NAME_RE.match(s):
                raise GeneratorError(f"bad state name {s!r}")
        for (s, a), outs in self.transitions.items():
            if a not in SYMBOLS:
                raise GeneratorError(f"bad symbol {a!r}")
            if s in (self.accept, self.reject):
                raise GeneratorError(f"final state {s} has outgoing transitions")
            if not outs:
                raise GeneratorError(f"empty transition list for ({s}, {a})")
            for s2, b, mv in outs:
                if b not in SYMBOLS or mv not in MOVES:
                    raise GeneratorError(f"bad transition ({s}, {a}) -> ({s2}, {b}, {mv})")
        for s in self.states:
            if s in (self.accept, self.reject):
                continue
            for a in SYMBOLS:
                if (s, a) not in self.transitions:
                    raise GeneratorError(f"no transition for ({s}, {a})")

    @property
    def deterministic(self) -> bool:
        return all(len(v) == 1 for v in self.transitions.values())


def parse_tm(text: str) -> TMSpec:
    """Read the line format::

        start q0
        accept yes
        reject no
        q0 1 -> yes 1 R

    ``_`` is the blank; ``%`` or ``#`` start comments.  Repeated left-hand
    sides give a non-deterministic machine.
    """
    head: dict[str, str] = {}
    trans: dict[tuple[str, str], list] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = re.split(r"[%#]", raw, maxsplit=1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("start", "accept", "reject") and len(parts) == 2:
            head[parts[0]] = parts[1]
            continue
        if len(parts) != 6 or parts[2] != "->":
            raise GeneratorError(f"line {ln}: expected 'state symbol -> state symbol move'")
        s, a, _, s2, b, mv = parts
        trans.setdefault((s, a), []).append((s2, b, mv.upper()))
    for key in ("start", "accept", "reject"):
        if key not in head:
            raise GeneratorError(f"missing '{key}' line")
    return TMSpec(head["start"], head["accept"], head["reject"],
                  {k: tuple(v) for k, v in trans.items()})


def format_tm(tm: TMSpec) -> str:
    out = [f"start {tm.start}", f"accept {tm.accept}", f"reject {tm.reject}"]
    for (s, a), outs in tm.transitions.items():
        for s2, b, mv in outs:
            out.append(f"{s} {a} -> {s2} {b} {mv}")
    return "\n".join(out) + "\n"


def tm_run(tm: TMSpec, tape: Sequence[str], step_bound: int):
    """Run ``tm`` for at most ``step_bound`` transitions.

    Deterministic machines give "accept", "reject" or "timeout"; otherwise
    the set of verdicts reachable along all branches.  Moving left from
    cell 0 keeps the head in place.
    """
    def step(state, pos, cells):
        a = cells.get(pos, BLANK)
        try:
            outs = tm.transitions[(state, a)]
        except KeyError:
            raise GeneratorError(f"no transition for ({state}, {a})") from None
        for s2, b, mv in outs:
            c2 = dict(cells)
            c2[pos] = b
            p2 = pos + 1 if mv == "R" else max(pos - 1, 0) if mv == "L" else pos
            yield s2, p2, c2

    def verdict(state):
        return "accept" if state == tm.accept else "reject" if state == tm.reject else None

    start = (tm.start, 0, {i: a for i, a in enumerate(tape) if a != BLANK})
    if tm.deterministic:
        state, pos, cells = start
        for _ in range(step_bound):
            if verdict(state):
                return verdict(state)
            state, pos, cells = next(step(state, pos, cells))
        return verdict(state) or "timeout"
    verdicts: set[str] = set()
    frontier = [start]
    for t in range(step_bound + 1):
        nxt = {}
        for state, pos, cells in frontier:
            v = verdict(state)
            if v:
                verdicts.add(v)
            elif t == step_bound:
                verdicts.add("timeout")
            else:
                for c in step(state, pos, cells):
                    key = (c[0], c[1], tuple(sorted(c[2].items())))
                    nxt[key] = c
        frontier = list(nxt.values())
    return verdicts


def encode_tape(order: Sequence[str], edges: Iterable[tuple[str, str]], a: str, b: str) -> list[str]:
    """Tape for ``in`` = edges and the marker (a, b), constants ranked by ``order``."""
    n = len(order)
    num = {c: i for i, c in enumerate(order)}
    edges = set(edges)
    tape = ["0"] * (2 * n * n)
    for x, y in edges:
        tape[num[x] + num[y] * n] = "1"
    tape[num[a] + num[b] * n + n * n] = "1"
    return tape


def tm_oracle(tm: TMSpec, constants: Sequence[str], edges, k: int, d: int,
              nondet: str | None = None) -> set[tuple[str, str]]:
    """Pairs (A,B) accepted under some strict total order of ``constants``.

    The machine gets exp_k(n^(d+1)) - 1 steps, the number of successor steps
    of the simulated clock.  For non-deterministic machines ``nondet``
    selects the reading: "brave" accepts when some branch says yes,
    "cautious" when every branch says no.
    """
    n = len(constants)
    bound = exp_k(k, n ** (d + 1)) - 1
    out = set()
    for a in constants:
        for b in constants:
            for order in itertools.permutations(sorted(constants)):
                v = tm_run(tm, encode_tape(order, edges, a, b), bound)
                if tm.deterministic:
                    hit = v == "accept"
                elif nondet == "cautious":
                    hit = v == {"reject"}
                else:
                    hit = "accept" in v
                if hit:
                    out.add((a, b))
                    break
    return out


def _state_pred(s: str) -> str:
    return f"state_{s}"


def _sym_pred(a: str) -> str:
    return f"symbol_{_SYM_NAME[a]}"


def gen_tm_simulation(tm: TMSpec, k: int, d: int, nondet: str | None = None,
                      absorbing: bool = False, n: int | None = None,
                      limit: int = DEFAULT_LIMIT) -> Program:
    """Order-(k+1) program whose ``out(A,B)`` simulates ``tm`` on the encoded input.

    Deterministic machines use the ``yes`` output.  Non-deterministic ones
    get one choice block per (symbol, state) with several moves, and
    ``nondet`` picks the output: "cautious" reads the reject state, "brave"
    the accept state.

    The output rule asks for *some* time point in the final state, so the
    final states need no outgoing moves.  ``absorbing`` adds self loops
    anyway; they keep the clock running to the last representable step,
    which is far more work for the engine.

    Time points and tape cells are order-k numbers, so the run is faithful
    for exp_k(n^(d+1)) - 1 steps.  Given ``n``, the generator refuses when
    one such number domain alone exceeds ``limit``.
    """
    if k < 1:
        raise GeneratorError("the simulation needs k >= 1")
    if d < 2:
        raise GeneratorError("the input encoding needs d >= 2 (positions Z2..Zd)")
    if n is not None:
        size = n ** (d + 1)
        for _ in range(k):
            size = 2 ** size if size < 64 else HUGE
        if size > limit:
            raise DomainExplosion(f"order-{k} numbers over n={n}, d={d}", size, limit)
    if tm.deterministic:
        if nondet not in (None, "brave", "cautious"):
            raise GeneratorError(f"unknown reasoning mode {nondet!r}")
        nondet = None
    elif nondet not in ("cautious", "brave"):
        raise GeneratorError("non-deterministic machines need nondet='cautious' or 'brave'")

    m = _Module()
    _ordering(m)
    _base_counter(m, d)
    for j in range(1, k + 1):
        _ho_counter(m, j, d)
    _lift(m, k, d)
    _input(m, d)

    num = f"({number_type(k, d)})"
    ctx = ["i", "i", ORD_T]
    xs = _tup("X", d)
    m.pred("out", "i", "i")
    m.pred("cursor", *ctx, num, num)
    for s in tm.states:
        m.pred(_state_pred(s), *ctx, num)
    for a in SYMBOLS:
        m.pred(_sym_pred(a), *ctx, num, num)
    m.pred("init_0", *ctx, num)
    m.pred("init_1", *ctx, num)

    first_k, succ_k, lt_k = f"first_{k}", f"succ_{k}", f"lt_{k}"
    m.rule(f"{_state_pred(tm.start)}(A,B,Ord,T)", f"{first_k}(Ord,T)")
    m.rule("cursor(A,B,Ord,T,P)", f"{first_k}(Ord,T)", f"{first_k}(Ord,P)")
    # the initial tape goes through init_0/init_1 so that the blank rule
    # negates only predicates below the transition cycle
    m.rule("init_0(A,B,Ord,P)", f"input_0(A,B,Ord,{xs})", f"lift_{k}(Ord,{xs},P)")
    m.rule("init_1(A,B,Ord,P)", f"input_1(A,B,Ord,{xs})", f"lift_{k}(Ord,{xs},P)")
    m.rule(f"{_sym_pred('0')}(A,B,Ord,T,P)", f"{first_k}(Ord,T)", "init_0(A,B,Ord,P)")
    m.rule(f"{_sym_pred('1')}(A,B,Ord,T,P)", f"{first_k}(Ord,T)", "init_1(A,B,Ord,P)")
    m.rule(f"{_sym_pred(BLANK)}(A,B,Ord,T,P)", f"{first_k}(Ord,T)",
           "not init_0(A,B,Ord,P)", "not init_1(A,B,Ord,P)")

    trans = dict(tm.transitions)
    if absorbing:
        for s in (tm.accept, tm.reject):
            for a in SYMBOLS:
                trans[(s, a)] = ((s, a, "S"),)

    for (s, a), outs in trans.items():
        cur = f"current_{s}_{_SYM_NAME[a]}"
        m.pred(cur, *ctx, num, num)
        m.rule(f"{cur}(A,B,Ord,T,P)", f"{_state_pred(s)}(A,B,Ord,T)", "cursor(A,B,Ord,T,P)",
               f"{_sym_pred(a)}(A,B,Ord,T,P)")
        guards: list[list[str]] = [[] for _ in outs]
        if len(outs) > 1:
            tag = f"{_SYM_NAME[a]}_{s}"
            ch = gen_choice_rules(tag, len(outs), number_type(k, d))
            for n in ch.declarations:
                m.pred(n, num)
            for i in range(len(outs), 0, -1):
                others = [f"not b_{tag}_{j}(T)" for j in range(1, len(outs) + 1) if j != i]
                m.rule(f"b_{tag}_{i}(T)", *others)
            guards = [[f"b_{tag}_{i}(T)"] for i in range(1, len(outs) + 1)]
        for g, (s2, b, mv) in zip(guards, outs):
            here = g + [f"{cur}(A,B,Ord,T,P)"]
            m.rule(f"{_state_pred(s2)}(A,B,Ord,T1)", *here, f"{succ_k}(Ord,T,T1)")
            m.rule(f"{_sym_pred(b)}(A,B,Ord,T1,P)", *here, f"{succ_k}(Ord,T,T1)")
            if mv == "R":
                m.rule("cursor(A,B,Ord,T1,P1)", *here, f"{succ_k}(Ord,P,P1)", f"{succ_k}(Ord,T,T1)")
            elif mv == "L":
                m.rule("cursor(A,B,Ord,T1,P1)", *here, f"{succ_k}(Ord,P1,P)", f"{succ_k}(Ord,T,T1)")
                # the left end of the tape holds the head in place
                m.rule("cursor(A,B,Ord,T1,P)", *here, f"{first_k}(Ord,P)", f"{succ_k}(Ord,T,T1)")
            else:
                m.rule("cursor(A,B,Ord,T1,P)", *here, f"{succ_k}(Ord,T,T1)")

    for a in SYMBOLS:
        sp = _sym_pred(a)
        m.rule(f"{sp}(A,B,Ord,T1,P1)", f"{succ_k}(Ord,T,T1)", f"{sp}(A,B,Ord,T,P1)",
               "cursor(A,B,Ord,T,P)", f"{lt_k}(Ord,P,P1)")
        m.rule(f"{sp}(A,B,Ord,T1,P1)", f"{succ_k}(Ord,T,T1)", f"{sp}(A,B,Ord,T,P1)",
               "cursor(A,B,Ord,T,P)", f"{lt_k}(Ord,P1,P)")

    final = tm.reject if nondet == "cautious" else tm.accept
    m.rule("out(A,B)", "ordering(Ord)", f"{_state_pred(final)}(A,B,Ord,T)")
    return m.program()


# ------------------------------------------------------------ sample machines

def _machine(rows, start="q0", accept="yes", reject="no") -> TMSpec:
    trans: dict = {}
    for s, a, s2, b, mv in rows:
        trans.setdefault((s, a), []).append((s2, b, mv))
    return TMSpec(start, accept, reject, {k: tuple(v) for k, v in trans.items()})


def immediate_accept_machine() -> TMSpec:
    """Accepts after one step whatever the tape holds."""
    return _machine([("q0", a, "yes", a, "S") for a in SYMBOLS])


def copy_bit_machine(n: int) -> TMSpec:
    """Accepts iff the graph bit under the marker is 1, i.e. iff in(A,B).

    For each cell j of the graph block it carries the bit read there n^2
    cells to the right; a 1 in the marker block settles the verdict,
    otherwise it walks back to cell j+1.
    """
    if n < 1:
        raise GeneratorError("n must be positive")
    w = n * n
    rows = []
    for a in ("0", "1"):
        rows.append(("q0", a, f"g{a}_1", a, "R"))
    rows.append(("q0", BLANK, "no", BLANK, "S"))
    for g in ("0", "1"):
        for i in range(1, w):
            for a in SYMBOLS:
                rows.append((f"g{g}_{i}", a, f"g{g}_{i + 1}", a, "R"))
        last = f"g{g}_{w}"
        rows.append((last, "1", "yes" if g == "1" else "no", "1", "S"))
        rows.append((last, BLANK, "no", BLANK, "S"))
        if w > 1:
            rows.append((last, "0", "back_1" if w > 2 else "q0", "0", "L"))
        else:
            rows.append((last, "0", "no", "0", "S"))
    # from cell j + w walk left w - 1 cells to j + 1
    for i in range(1, w - 1):
        nxt = f"back_{i + 1}" if i + 1 < w - 1 else "q0"
        for a in SYMBOLS:
            rows.append((f"back_{i}", a, nxt, a, "L"))
    return _machine(rows)


def parity_machine() -> TMSpec:
    """Accepts iff ``in`` has an odd number of edges.

    It counts all 1s up to the first blank; the marker block adds one.
    """
    rows = []
    for s, other in (("even", "odd"), ("odd", "even")):
        rows.append((s, "0", s, "0", "R"))
        rows.append((s, "1", other, "1", "R"))
    rows.append(("even", BLANK, "yes", BLANK, "S"))
    rows.append(("odd", BLANK, "no", BLANK, "S"))
    return _machine(rows, start="even")


def guess_machine() -> TMSpec:
    """Non-deterministic: on the first cell either accepts or rejects."""
    rows = [("q0", a, "yes", a, "S") for a in SYMBOLS]
    rows += [("q0", a, "no", a, "S") for a in SYMBOLS]
    return _machine(rows)


# ------------------------------------------------------------ counter checks

@dataclass
class CounterRun:
    """Counter of order k evaluated under the fixed order a < b < ... of n constants."""

    k: int
    d: int
    n: int
    chain: list          # numbers from first_k along succ_k
    less: set            # lt_k as pairs of numbers
    first: list
    last: list

    @property
    def expected_length(self) -> int:
        return exp_k(self.k, self.n ** (self.d + 1))

    def ok(self) -> bool:
        """Chain covers the whole domain, ends at last_k, and lt_k is the chain order."""
        c = self.chain
        rank = {v: i for i, v in enumerate(c)}
        want = {(x, y) for x in c for y in c if rank[x] < rank[y]}
        return (len(c) == self.expected_length and len(set(c)) == len(c)
                and self.first == [c[0]] and self.last == [c[-1]] and self.less == want)


def counter_constants(n: int) -> list[str]:
    return [f"c{i}" for i in range(n)]


def run_counter(k: int, d: int, n: int, **kw) -> CounterRun:
    """Evaluate the order-k counter with ``o`` fixed to the order c0 < c1 < ..."""
    from .engine import well_founded_model
    from .syntax import format_program, make_database
    base = gen_counter(k, d)
    m = _Module()
    if k == 0:
        args = _itup(d)
        x, y = _tup("X", d), _tup("Y", d)
    else:
        args = [f"({number_type(k, d)})"]
        x, y = "X", "Y"
    m.pred("o", "i", "i")
    m.pred("chain", *args, *args)
    m.pred("less", *args, *args)
    m.pred("fst", *args)
    m.pred("lst", *args)
    m.rule(f"chain({x},{y})", f"succ_{k}(o,{x},{y})")
    m.rule(f"less({x},{y})", f"lt_{k}(o,{x},{y})")
    m.rule(f"fst({x})", f"first_{k}(o,{x})")
    m.rule(f"lst({x})", f"last_{k}(o,{x})")
    extra = m.text()
    prog = parse_program(format_program(base) + extra)
    cs = counter_constants(n)
    db = make_database([("o", (cs[i], cs[j])) for i in range(n) for j in range(i + 1, n)],
                       constants=cs)
    model = well_founded_model(prog, db, **kw)
    w = d + 1 if k == 0 else 1

    def key(atom):
        return tuple(str(v) for v in atom)

    step = {}
    for atom in model.true_atoms("chain"):
        step[key(atom[:w])] = key(atom[w:])
    first = [key(a) for a in model.true_atoms("fst")]
    last = [key(a) for a in model.true_atoms("lst")]
    less = {(key(a[:w]), key(a[w:])) for a in model.true_atoms("less")}
    chain = list(first[:1])
    while chain and chain[-1] in step and len(chain) <= len(step):
        chain.append(step[chain[-1]])
    return CounterRun(k, d, n, chain, less, first, last)
