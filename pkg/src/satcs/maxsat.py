"""Exact weighted MaxSAT by linear SAT-UNSAT search.

The search keeps one incremental solver.  Each model found fixes an incumbent
cost ``c``; the bound "falsified soft weight <= c - 1" is then added through a
weighted totalizer over the soft-clause falsification indicators, until the
solver reports UNSAT and the last incumbent is optimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cnf import Clause, Model, WeightedCnf, satisfies_hard, soft_cost
from .encoder import EncoderContext
from .model import InputError
from .satsolver import Solver

BRUTE_FORCE_MAX_VARS = 24


@dataclass(frozen=True)
class OptResult:
    feasible: bool
    model: Model | None = None
    cost: int | None = None


INFEASIBLE = OptResult(False)


def encode_totalizer(ctx: EncoderContext, leaves: Sequence[tuple[int, int]],
                     cap: int) -> dict[int, int]:
    """Weighted totalizer over (weight, literal) leaves.

    Returns ``{v: lit}`` for every reachable sum ``v`` in ``1..cap`` (sums above
    ``cap`` are clipped to it); ``lit`` is true exactly when the weighted sum of
    true leaves is at least ``v``.  Clauses go both ways, so the auxiliary
    variables are functions of the leaves.
    """
    if cap < 1:
        raise InputError("cap must be positive")
    if len(leaves) == 1:
        w, lit = leaves[0]
        return {min(w, cap): lit}
    h = len(leaves) // 2
    left = encode_totalizer(ctx, leaves[:h], cap)
    right = encode_totalizer(ctx, leaves[h:], cap)
    sums = sorted({min(a + b, cap) for a in (0, *left) for b in (0, *right)} - {0})
    out = {v: ctx.new_var() for v in sums}

    # left >= a and right >= b  ->  out >= a + b
    for a in (0, *left):
        for b in (0, *right):
            if a == b == 0:
                continue
            clause = [-left[a]] if a else []
            if b:
                clause.append(-right[b])
            clause.append(out[min(a + b, cap)])
            ctx.add(*clause)
    # out >= v  ->  out >= v' for v' < v
    for lo, hi in zip(sums, sums[1:]):
        ctx.add(-out[hi], out[lo])
    # left < next(a) and right < next(b)  ->  out < (first output above a + b)
    lvals, rvals = sorted(left), sorted(right)
    for a in (0, *lvals):
        na = next((x for x in lvals if x > a), None)
        for b in (0, *rvals):
            nb = next((x for x in rvals if x > b), None)
            above = next((v for v in sums if v > a + b), None)
            if above is None:
                continue
            clause = []
            if na is not None:
                clause.append(left[na])
            if nb is not None:
                clause.append(right[nb])
            clause.append(-out[above])
            ctx.add(*clause)
    return out


def encode_atmost_k(ctx: EncoderContext, literals: Sequence[int], k: int) -> list[Clause]:
    """Add clauses satisfied iff at most ``k`` of ``literals`` are true."""
    if not 0 <= k <= len(literals):
        raise InputError(f"bound {k} outside [0, {len(literals)}]")
    start = len(ctx.clauses)
    if k == 0:
        for lit in literals:
            ctx.add(-lit)
    elif k < len(literals):
        out = encode_totalizer(ctx, [(1, l) for l in literals], k + 1)
        ctx.add(-out[k + 1])
    return ctx.clauses[start:]


def solve_maxsat(w: WeightedCnf, *, on_incumbent: Callable[[int], None] | None = None,
                 **solver_options) -> OptResult:
    """Minimum soft-cost model of the hard clauses, or ``INFEASIBLE``."""
    solver = Solver(w.num_vars, **solver_options)
    # units first, so root-level simplification shortens the rest
    for c in sorted(w.hard, key=len):
        if not solver.add_clause(c):
            return INFEASIBLE

    base = 0                                   # weight of empty soft clauses
    indicators: list[tuple[int, int]] = []     # (weight, literal true when falsified)
    for clause, weight in w.soft:
        if not clause:
            base += weight
        elif len(clause) == 1:
            indicators.append((weight, -clause[0]))
        else:
            r = solver.new_var()
            solver.add_clause((*clause, r))
            indicators.append((weight, r))

    result = solver.solve()
    if not result:
        return INFEASIBLE
    model = result.model.restrict(w.num_vars)
    cost = soft_cost(w, model)
    if on_incumbent:
        on_incumbent(cost)

    if cost > base:
        ctx = EncoderContext(next_var=solver.num_vars + 1)
        outputs = encode_totalizer(ctx, indicators, cost - base)
        solver.ensure_vars(ctx.num_vars)
        for c in ctx.clauses:
            solver.add_clause(c)
        while cost > base:
            # forbid indicator weight >= cost - base
            bound = min(v for v in outputs if v >= cost - base)
            solver.add_clause([-outputs[bound]])
            result = solver.solve()
            if not result:
                break
            model = result.model.restrict(w.num_vars)
            new_cost = soft_cost(w, model)
            assert new_cost < cost
            cost = new_cost
            if on_incumbent:
                on_incumbent(cost)
    return OptResult(True, model, cost)


def _enumerate_chunks(n: int, chunk_bits: int = 16):
    """Yield (offset, bool array of shape (rows, n+1)) covering all 2**n assignments.

    Column ``v`` holds variable ``v``; variable 1 is the least significant bit
    of the assignment index.
    """
    total = 1 << n
    step = 1 << min(n, chunk_bits)
    shifts = np.arange(n, dtype=np.int64)
    for offset in range(0, total, step):
        idx = np.arange(offset, offset + step, dtype=np.int64)
        bits = ((idx[:, None] >> shifts) & 1).astype(bool)
        yield offset, np.concatenate([np.zeros((step, 1), bool), bits], axis=1)


def _clause_mask(bits: np.ndarray, clause: Clause) -> np.ndarray:
    sat = np.zeros(bits.shape[0], dtype=bool)
    for lit in clause:
        sat |= bits[:, lit] if lit > 0 else ~bits[:, -lit]
    return sat


def brute_force_maxsat(w: WeightedCnf) -> OptResult:
    """Exhaustive reference optimiser (at most ``BRUTE_FORCE_MAX_VARS`` variables)."""
    n = w.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise InputError(f"{n} variables exceed the brute-force limit of {BRUTE_FORCE_MAX_VARS}")
    best_cost, best_index = None, None
    for offset, bits in _enumerate_chunks(n):
        ok = np.ones(bits.shape[0], dtype=bool)
        for c in w.hard:
            ok &= _clause_mask(bits, c)
        if not ok.any():
            continue
        cost = np.zeros(bits.shape[0], dtype=np.int64)
        for c, wt in w.soft:
            cost += wt * ~_clause_mask(bits, c)
        cost = np.where(ok, cost, np.iinfo(np.int64).max)
        k = int(np.argmin(cost))
        if best_cost is None or cost[k] < best_cost:
            best_cost, best_index = int(cost[k]), offset + k
    if best_cost is None:
        return INFEASIBLE
    model = Model([(best_index >> (v - 1)) & 1 for v in range(1, n + 1)])
    assert satisfies_hard(w, model)
    return OptResult(True, model, best_cost)
