"""Three-valued meaning through pairs of two-valued interpretations.

An undefined atom is the pair (false, true): the lower bound says it is
not known to hold, the upper bound that it may.  One step of the
approximating operator refines both bounds; the well-founded model is the
limit of alternating least fixpoints.

Run:  python demos/pair_semantics.py
"""

from hodatalog import (Interp, PairInterp, ap_step, bottom_pair, lfp_first, lfp_second,
                       parse_program, stable_models, tp_three_valued, well_founded_model)
from hodatalog._compile import compile_program

text = """
#pred p : o.
#pred q : o.
#pred r : o.
#pred s : o.
#pred t : o.
p :- not q.
q :- not p.
r :- not r.
r :- p, q.
s :- not t.
"""
cp = compile_program(parse_program(text), None, ["a"])

pi = bottom_pair(cp)
for i in range(4):
    print(f"step {i}:", {p: str(pi.value(p)) for p in "pqrst"})
    pi = ap_step(None, pi=pi)

print("three-valued step on the same pair:", {p: str(v) for p, v in
      tp_three_valued(None, interp3=pi).items()})

# t has no rules, so it turns false after one step and s true after two;
# the even loop p/q and the odd loop on r stay undefined.
lo = lfp_first(cp, j={p: 1 for p in "pqrst"})
hi = lfp_second(cp, i=lo.codes, start=lo.codes)
print("lfp A(., top)_1 =", lo.codes, " lfp A(I, .)_2 =", hi.codes)

w = well_founded_model(cp)
print("well-founded model:", {p: str(w.value(p)) for p in "pqrst"})

# r :- not r rules out every two-valued fixpoint: choosing p still leaves r open
guess = Interp(cp, {"p": 1, "q": 0, "r": 0, "s": 1, "t": 0})
total = PairInterp(guess, guess)
print("{p, s} is a fixpoint of the step:", ap_step(None, pi=total) == total)
print("stable models:", len(stable_models(cp)))
