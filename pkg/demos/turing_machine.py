"""A Turing machine run inside a stratified order-2 program.

The input graph ``in`` over two constants is written on the tape as an
adjacency matrix followed by a block that marks the output pair (A,B).
Time points and tape cells are order-1 numbers, so the program can follow
the machine for 255 steps.  The parity machine accepts exactly when the
graph has an odd number of edges.

Run:  python demos/turing_machine.py      (about ten seconds)
"""

import time

from hodatalog import make_database, stratify, well_founded_model
from hodatalog.genlib import format_tm, gen_tm_simulation, parity_machine, tm_oracle

tm = parity_machine()
print(format_tm(tm))
prog = gen_tm_simulation(tm, k=1, d=2)
print(f"{len(prog.rules)} rules, stratified: {stratify(prog).stratified}")

for edges in [{("a", "b")}, {("a", "b"), ("b", "a")}]:
    db = make_database([("in", e) for e in edges], constants=["a", "b"])
    t = time.time()
    out = set(well_founded_model(prog, db).true_atoms("out"))
    print(f"in={sorted(edges)}: out={sorted(out)} "
          f"(direct run: {sorted(tm_oracle(tm, ['a', 'b'], edges, 1, 2))}) "
          f"{time.time() - t:.1f}s")
