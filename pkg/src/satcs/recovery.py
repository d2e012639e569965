"""Signal recovery by MaxSAT, by l1 relaxation, or by exhaustive search."""

from __future__ import annotations

import itertools
import time

import numpy as np

from .encoder import decode_model, encode_instance
from .l1 import recover_l1
from .maxsat import solve_maxsat
from .model import InputError, RecoveryReport, SensingInstance, make_report

BRUTE_FORCE_MAX_N = 24
METHODS = ("sat", "l1", "brute")


def brute_force_l0(A, y, *, chunk: int = 4096) -> np.ndarray | None:
    """A sparsest binary ``x`` with ``Ax = y``, or None if there is none.

    Supports are tried in order of increasing size (lexicographic within a
    size), so the first hit is a minimum-sparsity solution.
    """
    A = np.asarray(A, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    m, n = A.shape
    if n > BRUTE_FORCE_MAX_N:
        raise InputError(f"N={n} exceeds the brute-force limit of {BRUTE_FORCE_MAX_N}")
    if y.shape != (m,):
        raise InputError("measurement length differs from the row count")
    if not y.any():
        return np.zeros(n, dtype=np.uint8)
    for k in range(1, n + 1):
        combos = itertools.combinations(range(n), k)
        while True:
            block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)),
                                dtype=np.int64)
            if block.size == 0:
                break
            idx = block.reshape(-1, k)
            sums = A[:, idx].sum(axis=2)                 # (m, combos)
            hit = np.flatnonzero((sums == y[:, None]).all(axis=0))
            if hit.size:
                x = np.zeros(n, dtype=np.uint8)
                x[idx[hit[0]]] = 1
                return x
    return None


def recover_sat(inst: SensingInstance) -> RecoveryReport:
    t0 = time.perf_counter()
    enc = encode_instance(inst)
    res = solve_maxsat(enc.wcnf)
    xhat = decode_model(res.model, inst.n, enc.var_map) if res.feasible else None
    return make_report("sat", xhat, inst.truth, time.perf_counter() - t0)


def recover_brute(inst: SensingInstance) -> RecoveryReport:
    t0 = time.perf_counter()
    xhat = brute_force_l0(inst.matrix, inst.measurements)
    return make_report("brute", xhat, inst.truth, time.perf_counter() - t0)


def recover(inst: SensingInstance, method: str) -> RecoveryReport:
    if method == "sat":
        return recover_sat(inst)
    if method == "l1":
        return recover_l1(inst)
    if method == "brute":
        return recover_brute(inst)
    raise InputError(f"unknown method {method!r}; expected one of {METHODS}")
