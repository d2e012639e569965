"""
Minimum measurements across sparsity levels
===========================================

For each sparsity the number of rows is increased until every one of a batch
of fresh instances is recovered exactly.  The reduced size here (N = 20,
10 trials) runs in well under a minute; ``satcs bench --preset fig3`` runs the
full N = 30 sweep.
"""

import sys
from fractions import Fraction

from satcs.bench import ExperimentConfig, oversampling_experiment, write_csv_stream

cfg = ExperimentConfig("oversampling", (20, 20),
                       tuple(Fraction(k, 10) for k in range(1, 6)), Fraction(1, 2), trials=10)
rows = oversampling_experiment(cfg, progress=lambda msg: print(msg, file=sys.stderr))

# the factor m / (s ln(N/s)) normalises away the expected growth with s
print(" s   m_min(sat)  m_min(l1)  factor(sat)  factor(l1)")
by = {(r.method, r.s): r for r in rows}
for s in sorted({r.s for r in rows}):
    a, b = by["sat", s], by["l1", s]
    print(f"{s:2d}   {a.m:9d}  {b.m:9d}  {a.metric:11.3f}  {b.metric:10.3f}")

print()
write_csv_stream(rows)
