"""Hamilton paths with an existentially quantified order.

The program guesses a strict total order ``Ord`` of all vertices and
checks that consecutive elements are joined by edges.  ``Ord`` is a
predicate variable that occurs only in the body, so the query is
second-order, yet the program is stratified and has a two-valued
well-founded model.

Run:  python demos/hamilton.py
"""

from hodatalog import (classify_order, eliminate_all, format_program, parse_database, stratify,
                       typecheck, verify_equivalence, well_founded_model)
from hodatalog.genlib import gen_hamilton

prog = gen_hamilton()
rule = next(r for r in format_program(prog).splitlines() if r.startswith("hamilton("))
print("rule:", rule)

tp = typecheck(prog)
print("order:", classify_order(tp).k, "| stratified:", stratify(tp).stratified)

db = parse_database("e(a,b). e(b,c). e(c,a). e(a,c).")
model = well_founded_model(prog, db)
print("hamilton pairs:", model.true_atoms("hamilton"))

# The same query without predicate variables in rule bodies: the order is
# built up one pair at a time from the empty relation.
flat = eliminate_all(prog)
extra = [r for r in format_program(flat).splitlines() if "__test" in r and ":-" in r]
print("\nafter elimination:")
for r in extra:
    print("  ", r)

small = parse_database("e(a,b). e(b,a).")
diffs = verify_equivalence(prog, flat, small, vocabulary=tuple(prog.declarations))
print("equivalent on", "e(a,b). e(b,a).", ":", not diffs)
