"""
The l1 relaxation versus exact l0 recovery
==========================================

Both methods see the same measurements.  The LP is solved in exact rational
arithmetic, so fractional optima show up as fractions.
"""

from satcs import gen_instance, recover
from satcs.l1 import binarize, solve_l1

# a dense signal relative to the number of rows: hard for the relaxation
inst = gen_instance(16, 6, "1/2", 9, seed=21)
print("truth   ", inst.truth)

xf = solve_l1(inst.matrix, inst.measurements)
print("LP      ", " ".join(str(v) for v in xf))
print("LP bound", sum(xf))
print("rounded ", binarize(xf))

for method in ("l1", "sat", "brute"):
    r = recover(inst, method)
    print(f"{method:5s} cost {r.cost}  exact {r.exact}  {r.elapsed * 1000:.0f} ms")

# with few rows the sparsest consistent signal need not be unique, so even an
# exact l0 optimum can differ from the truth; more rows remove the ambiguity.
# Scanning m shows where each method first recovers this signal
print("\n m  l1  sat")
for m in range(4, 17):
    inst = gen_instance(16, 6, "1/2", m, seed=21)
    flags = ["yes" if recover(inst, meth).exact else " no" for meth in ("l1", "sat")]
    print(f"{m:2d} {flags[0]} {flags[1]}")
