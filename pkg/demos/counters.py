"""Counting with relations of growing order.

Given an order on n constants, tuples of width d+1 count to n^(d+1) - 1.
An order-1 number is a set of such tuples read as a binary numeral, an
order-2 number a set of order-1 numbers, and so on: each level is
exponentially longer than the one below.

Run:  python demos/counters.py
"""

from hodatalog.genlib import exp_k, run_counter

for k, d, n in [(0, 1, 2), (1, 0, 2), (1, 0, 3), (2, 0, 2)]:
    run = run_counter(k, d, n)
    shown = " -> ".join(",".join(c) for c in run.chain[:6])
    more = " -> ..." if len(run.chain) > 6 else ""
    print(f"k={k} d={d} n={n}: {len(run.chain)} numbers "
          f"(expected {exp_k(k, n ** (d + 1))}), lt is the chain order: {run.ok()}")
    print("   ", shown + more)
