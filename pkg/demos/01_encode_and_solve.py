"""
Recovering a sparse binary signal with MaxSAT
=============================================

A small instance is generated, turned into weighted CNF and solved exactly.
"""

import numpy as np

from satcs import encode_instance, gen_instance, solve_maxsat
from satcs.cnf import emit_wcnf
from satcs.encoder import decode_model

# a length-12 signal with 3 ones, observed through 6 Bernoulli(1/2) rows
inst = gen_instance(12, 3, "1/2", 6, seed=42)
print("A =")
print(inst.matrix)
print("y =", inst.measurements)
print("x =", inst.truth)

# each row becomes an adder tree whose output is pinned to y_i
enc = encode_instance(inst)
w = enc.wcnf
print(f"\n{w.num_vars} variables, {len(w.hard)} hard clauses, {len(w.soft)} soft, top {w.top}")
print("first lines of the WCNF file:")
print("\n".join(emit_wcnf(w).splitlines()[:6]))

# every soft clause (-x_j) that is violated costs 1, so the optimum is the sparsest signal
res = solve_maxsat(w, on_incumbent=lambda c: print("  incumbent cost", c))
xhat = decode_model(res.model, inst.n, enc.var_map)
print("\noptimum cost", res.cost)
print("recovered  ", xhat)
print("exact      ", bool(np.array_equal(xhat, inst.truth)))
