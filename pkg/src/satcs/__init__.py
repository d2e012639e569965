"""Exact recovery of sparse binary signals through weighted MaxSAT.

A measurement ``y = A x`` with binary ``A`` and ``x`` is encoded as hard
adder-circuit clauses; unit soft clauses ``-x_j`` make every minimum-cost
model a sparsest consistent signal.  An exact l1 (linear programming)
baseline, an exhaustive oracle and the recovery experiments come along.
"""

from .bench import (ExperimentConfig, PRESETS, ResultRow, error_vs_compression_experiment,
                    gen_instance, min_measurements, oversampling_experiment, write_csv)
from .cnf import CnfFormula, Model, WeightedCnf, evaluate, soft_cost
from .encoder import decode_model, encode_instance
from .l1 import binarize, recover_l1, solve_l1
from .maxsat import OptResult, brute_force_maxsat, solve_maxsat
from .model import (InputError, ParseError, RecoveryReport, SensingInstance, measure,
                    recovery_error, sparsity)
from .recovery import brute_force_l0, recover, recover_brute, recover_sat
from .satsolver import Solver, SolveResult, solve

__version__ = "0.1.0"
