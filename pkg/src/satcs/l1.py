"""l1-minimisation baseline: min sum(x) s.t. Ax = y, 0 <= x <= 1.

Solved exactly over the rationals with a two-phase, bounded-variable
tableau simplex using Bland's rule.  Nonbasic variables sit at either bound,
so the box constraints never enter the tableau as rows.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import InputError, RecoveryReport, SensingInstance, as_signal, make_report

HALF = Fraction(1, 2)


class _Tableau:
    """Dense tableau ``B^-1 A`` with basic values and nonbasic bound status."""

    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction],
                 upper: list[Fraction | None], basis: list[int]):
        self.T = rows
        self.beta = rhs
        self.upper = upper          # None means +inf
        self.basis = basis
        self.at_upper = [False] * len(upper)

    def value(self, j: int) -> Fraction:
        if j in self.basis:
            return self.beta[self.basis.index(j)]
        return self.upper[j] if self.at_upper[j] else Fraction(0)

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        row = T[r]
        p = row[j]
        if p != 1:
            row[:] = [a / p for a in row]
        for i, other in enumerate(T):
            if i != r:
                f = other[j]
                if f:
                    other[:] = [a - f * b if b else a for a, b in zip(other, row)]
        self.basis[r] = j

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        d = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                d = [dj - cb * t for dj, t in zip(d, self.T[i])]
        return d

    def run(self, cost: list[Fraction], allowed: range) -> None:
        """Minimise ``cost`` over the columns in ``allowed`` with Bland's rule."""
        d = self.reduced_costs(cost)
        while True:
            basic = set(self.basis)
            enter = None
            for j in allowed:
                if j in basic:
                    continue
                if (d[j] < 0 and not self.at_upper[j]) or (d[j] > 0 and self.at_upper[j]):
                    enter = j
                    break
            if enter is None:
                return
            delta = -1 if self.at_upper[enter] else 1

            # largest step t keeping every basic variable within its bounds
            best_t, leave, leave_to_upper = self.upper[enter], None, False
            for i, b in enumerate(self.basis):
                alpha = delta * self.T[i][enter]
                if alpha > 0:
                    t, to_upper = self.beta[i] / alpha, False
                elif alpha < 0 and self.upper[b] is not None:
                    t, to_upper = (self.upper[b] - self.beta[i]) / -alpha, True
                else:
                    continue
                if (best_t is None or t < best_t
                        or (t == best_t and leave is not None and b < self.basis[leave])):
                    best_t, leave, leave_to_upper = t, i, to_upper
            if best_t is None:
                raise ArithmeticError("unbounded direction in a bounded LP")

            for i in range(len(self.beta)):
                a = self.T[i][enter]
                if a:
                    self.beta[i] -= delta * a * best_t
            if leave is None:
                self.at_upper[enter] = not self.at_upper[enter]
            else:
                entering_value = (self.upper[enter] if self.at_upper[enter] else 0) + delta * best_t
                out = self.basis[leave]
                self.at_upper[out] = leave_to_upper
                self.at_upper[enter] = False
                self.pivot(leave, enter)
                self.beta[leave] = Fraction(entering_value)
                dj = d[enter]
                d = [x - dj * t for x, t in zip(d, self.T[leave])]


def solve_l1(A, y) -> list[Fraction] | None:
    """Exact optimal basic solution of the box-constrained l1 problem, or None if infeasible."""
    A = np.asarray(A)
    y = np.asarray(y)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise InputError(f"matrix {A.shape} and measurements {y.shape} disagree")
    m, n = A.shape
    rows, rhs = [], []
    for i in range(m):
        sign = -1 if y[i] < 0 else 1
        row = [Fraction(sign * int(a)) for a in A[i]]
        row += [Fraction(int(k == i)) for k in range(m)]      # artificial columns
        rows.append(row)
        rhs.append(Fraction(sign * int(y[i])))
    upper = [Fraction(1)] * n + [None] * m
    tab = _Tableau(rows, rhs, upper, list(range(n, n + m)))

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1, range(n + m))
    if any(tab.beta[i] != 0 for i, b in enumerate(tab.basis) if b >= n):
        return None

    # drive zero-valued artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.basis):
        if tab.basis[r] >= n:
            j = next((j for j in range(n) if j not in tab.basis and tab.T[r][j] != 0), None)
            if j is None:
                del tab.T[r], tab.beta[r], tab.basis[r]
                continue
            value = tab.value(j)
            tab.pivot(r, j)
            tab.beta[r] = value
        r += 1
    for row in tab.T:
        del row[n:]
    del tab.upper[n:], tab.at_upper[n:]

    tab.run([Fraction(1)] * n, range(n))
    return [tab.value(j) for j in range(n)]


def binarize(xf: Sequence[Fraction], threshold: Fraction = HALF) -> np.ndarray:
    """Round a fractional signal: entries at or above ``threshold`` become 1."""
    return as_signal([1 if v >= threshold else 0 for v in xf])


def recover_l1(inst: SensingInstance, threshold: Fraction = HALF) -> RecoveryReport:
    t0 = time.perf_counter()
    xf = solve_l1(inst.matrix, inst.measurements)
    xhat = None if xf is None else binarize(xf, threshold)
    return make_report("l1", xhat, inst.truth, time.perf_counter() - t0)
