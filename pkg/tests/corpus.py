"""Seeded random programs shared by the semantic tests and the acceptance run."""

from __future__ import annotations

import itertools
import random

from hodatalog import Interp, PairInterp, parse_program
from hodatalog._compile import compile_program

HO_DECLS = """\
#pred p : o.
#pred q : o.
#pred r : i -> o.
#pred h : (i -> o) -> o.
"""

_COMMON = ["p", "not p", "q", "not q", "r(a)", "not r(a)", "h(r)", "not h(r)"]
_EXIST = ["h(S)", "not h(S)", "S(a)", "not S(a)"]


def _body(rng: random.Random, extra: list[str]) -> list[str]:
    pool = _COMMON + extra
    body = rng.sample(pool, rng.randint(0, 2))
    if rng.random() < 0.25:
        # body-only predicate variable; S(a) pins its type to i -> o
        body += ["S(a)" if rng.random() < 0.5 else "not S(a)", rng.choice(_EXIST[:2])]
    return body


def random_ho_program_text(rng: random.Random) -> str:
    """Order-2 program over p, q : o, r : i -> o and h : (i -> o) -> o with constant a."""
    lines = [HO_DECLS]
    for _ in range(rng.randint(1, 5)):
        kind = rng.choice(("p", "q", "r", "h"))
        if kind in ("p", "q"):
            head, extra = kind, []
        elif kind == "r":
            head, extra = "r(X)", ["X = a", "r(X)", "not r(X)"]
        else:
            head, extra = "h(R)", ["R(a)", "not R(a)", "h(R)", "not h(R)"]
        body = _body(rng, extra)
        if kind == "r" and not any("X" in b for b in body):
            body.append("X = a")
        if kind == "h" and not any("R" in b for b in body):
            body.append(rng.choice(["R(a)", "not R(a)"]))
        lines.append(f"{head} :- {', '.join(body)}." if body else f"{head}.")
    lines.append("p :- q, not q.")  # keeps constant a and both nullary names in use
    lines.append("r(a) :- p, not p.")
    return "\n".join(lines) + "\n"


def ho_corpus(count: int = 100, seed: int = 2024):
    """(text, compiled program) pairs."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        text = random_ho_program_text(rng)
        out.append((text, compile_program(parse_program(text))))
    return out


def all_consistent_pairs(cp):
    """Every consistent pair of interpretations of the compiled program."""
    preds = list(cp.preds)
    cells = [cp.preds[p].cells for p in preds]
    total = sum(cells)
    for trits in itertools.product((0, 1, 2), repeat=total):
        lo, hi, pos = {}, {}, 0
        for p, c in zip(preds, cells):
            l = h = 0
            for j in range(c):
                t = trits[pos + j]
                l |= (t == 2) << j
                h |= (t >= 1) << j
            lo[p], hi[p] = l, h
            pos += c
        yield PairInterp(Interp(cp, lo), Interp(cp, hi))


def info_leq_pair(a: PairInterp, b: PairInterp) -> bool:
    """a is below b in the information (precision) order."""
    return all(a.lo.codes[p] & ~b.lo.codes[p] == 0 and b.hi.codes[p] & ~a.hi.codes[p] == 0
               for p in a.lo.codes)


def refine(rng: random.Random, pi: PairInterp) -> PairInterp:
    """A random pair at least as precise as ``pi``."""
    cp = pi.cp
    lo, hi = dict(pi.lo.codes), dict(pi.hi.codes)
    for p in lo:
        for j in range(cp.preds[p].cells):
            bit = 1 << j
            if hi[p] & bit and not lo[p] & bit:
                c = rng.random()
                if c < 1 / 3:
                    lo[p] |= bit
                elif c < 2 / 3:
                    hi[p] &= ~bit
    return PairInterp(Interp(cp, lo), Interp(cp, hi))


EXIST_DECLS = """\
#pred e : i -> i -> o.
#pred q : i -> o.
#pred p : i -> o.
#pred s : i -> o.
#pred u : o.
#pred w : o.
"""

_R_LITS = ["R(X)", "not R(X)", "R(Y)", "not R(Y)"]
_PLAIN = ["e(X,Y)", "e(Y,X)", "not e(X,Y)", "q(Y)", "not q(X)", "X = Y", "not X = Y"]


def random_existential_program_text(rng: random.Random) -> str:
    """One rule with a body-only R : i -> o, plus a few ordinary rules around it."""
    lines = [EXIST_DECLS, "q(X) :- e(X,X).", "q(X) :- e(X,Y), not e(Y,X)."]
    body = [rng.choice(_R_LITS)] + rng.sample(_R_LITS + _PLAIN, rng.randint(1, 3))
    if not any("Y" in b for b in body if "R" not in b):
        body.append("e(X,Y)")  # pins Y to i
    lines.append(f"p(X) :- {', '.join(dict.fromkeys(body))}.")
    lines.append(f"s(X) :- {rng.choice(['not p(X)', 'p(X), q(X)', 'p(Y), e(Y,X)'])}.")
    if rng.random() < 0.4:
        # an even loop gives several stable models to compare
        lines += ["u :- not w, p(a).", "w :- not u."]
    return "\n".join(lines) + "\n"
