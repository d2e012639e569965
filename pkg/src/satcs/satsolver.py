"""Incremental CDCL SAT solver.

Two-watched-literal propagation, first-UIP learning with local minimisation,
activity (VSIDS) branching, phase saving, geometric restarts and LBD-based
learnt clause deletion.  Assumptions are decided first; when one of them is
refuted the final conflict is traced back to a subset of the assumptions.

Internally literal ``v`` is coded as ``2*v`` and ``-v`` as ``2*v + 1``, so
negation is ``code ^ 1`` and per-literal state lives in flat lists.
"""

from __future__ import annotations

import heapq
import logging
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cnf import CnfFormula, Model
from .model import InputError

log = logging.getLogger(__name__)

_UNDEF = -1


@dataclass(frozen=True)
class SolveResult:
    satisfiable: bool
    model: Model | None = None
    core: tuple[int, ...] = ()

    def __bool__(self):
        return self.satisfiable


class _Learnt(list):
    __slots__ = ("lbd",)


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _lit(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


class Solver:
    """Incremental CDCL solver.

    >>> s = Solver(2, [[1, 2], [-1, 2]])
    >>> r = s.solve()
    >>> r.satisfiable, r.model[2]
    (True, True)
    """

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (), *,
                 seed: int | None = None, restart_first: int = 100,
                 restart_inc: float = 1.5, verbose: int = 0):
        self.num_vars = 0
        self._val: list[int] = [_UNDEF, _UNDEF]   # per literal code
        self._level: list[int] = [0]
        self._reason: list = [None]
        self._activity: list[float] = [0.0]
        self._phase: list[bool] = [False]
        self._seen: list[int] = [0]
        self._watches: list[list] = [[], []]
        self._bins: list[list] = [[], []]   # code -> [(implied code, reason)]
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._var_decay = 0.95
        self._learnts: list[_Learnt] = []
        self._num_original = 0
        self._ok = True
        self._rng = random.Random(seed) if seed is not None else None
        self.restart_first = restart_first
        self.restart_inc = restart_inc
        self.verbose = verbose
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}
        for _ in range(num_vars):
            self.new_var()
        for c in clauses:
            self.add_clause(c)

    # -- problem construction -------------------------------------------------

    def new_var(self) -> int:
        self.num_vars += 1
        v = self.num_vars
        self._val += [_UNDEF, _UNDEF]
        self._watches += [[], []]
        self._bins += [[], []]
        self._level.append(0)
        self._reason.append(None)
        act = self._rng.random() * 1e-5 if self._rng else 0.0
        self._activity.append(act)
        self._phase.append(False)
        self._seen.append(0)
        heapq.heappush(self._heap, (-act, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self.num_vars < n:
            self.new_var()

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause at the root level.  Returns False once the formula is UNSAT."""
        if self._trail_lim:
            self._cancel_until(0)
        if not self._ok:
            return False
        codes = []
        val = self._val
        for lit in lits:
            if lit == 0 or abs(lit) > self.num_vars:
                raise InputError(f"literal {lit} out of range (num_vars={self.num_vars})")
            c = _code(lit)
            if val[c] == 1 or (c ^ 1) in codes:
                return True          # satisfied at root or tautology
            if val[c] == 0 or c in codes:
                continue
            codes.append(c)
        self._num_original += 1
        if not codes:
            self._ok = False
        elif len(codes) == 1:
            self._enqueue(codes[0], None)
            self._ok = self._propagate() is None
        else:
            self._attach(codes)
        return self._ok

    def _attach(self, c: list[int]) -> None:
        if len(c) == 2:
            a, b = c
            self._bins[a].append((b, [b, a]))
            self._bins[b].append((a, [a, b]))
        else:
            self._watches[c[0]].append(c)
            self._watches[c[1]].append(c)

    # -- core machinery -------------------------------------------------------

    @property
    def _log_level(self) -> int:
        return logging.INFO if self.verbose else logging.DEBUG

    def _enqueue(self, code: int, reason) -> None:
        v = code >> 1
        self._val[code] = 1
        self._val[code ^ 1] = 0
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(code)

    def _propagate(self):
        val = self._val
        watches = self._watches
        bins = self._bins
        trail = self._trail
        level = self._level
        reason = self._reason
        dl = len(self._trail_lim)
        qhead = self._qhead
        conflict = None
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            for other, r in bins[false_lit]:
                vo = val[other]
                if vo == 1:
                    continue
                if vo == 0:
                    conflict = r
                    break
                val[other] = 1
                val[other ^ 1] = 0
                v = other >> 1
                level[v] = dl
                reason[v] = r
                trail.append(other)
            if conflict is not None:
                break
            ws = watches[false_lit]
            n = len(ws)
            i = j = 0
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != 0:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == 0:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        val[first] = 1
                        val[first ^ 1] = 0
                        v = first >> 1
                        level[v] = dl
                        reason[v] = c
                        trail.append(first)
            del ws[j:]
            if conflict is not None:
                break
        self.stats["propagations"] += qhead - self._qhead
        self._qhead = len(trail) if conflict is not None else qhead
        return conflict

    def _cancel_until(self, lvl: int) -> None:
        if len(self._trail_lim) <= lvl:
            return
        val = self._val
        phase = self._phase
        act = self._activity
        heap = self._heap
        trail = self._trail
        start = self._trail_lim[lvl]
        for k in range(len(trail) - 1, start - 1, -1):
            code = trail[k]
            v = code >> 1
            val[code] = _UNDEF
            val[code ^ 1] = _UNDEF
            self._reason[v] = None
            phase[v] = not (code & 1)
            heapq.heappush(heap, (-act[v], v))
        del trail[start:]
        del self._trail_lim[lvl:]
        self._qhead = start

    def _bump_var(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                act[u] *= 1e-100
            self._var_inc *= 1e-100
            self._rebuild_heap()
        elif self._val[2 * v] == _UNDEF:
            heapq.heappush(self._heap, (-act[v], v))

    def _rebuild_heap(self) -> None:
        val = self._val
        act = self._activity
        self._heap = [(-act[v], v) for v in range(1, self.num_vars + 1) if val[2 * v] == _UNDEF]
        heapq.heapify(self._heap)

    def _pick_branch(self) -> int | None:
        if len(self._heap) > 4 * self.num_vars + 64:
            self._rebuild_heap()
        heap = self._heap
        val = self._val
        act = self._activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == _UNDEF and -a == act[v]:
                return 2 * v if self._phase[v] else 2 * v + 1
        # stale entries exhausted: fall back to a scan (keeps completeness)
        for v in range(1, self.num_vars + 1):
            if val[2 * v] == _UNDEF:
                return 2 * v if self._phase[v] else 2 * v + 1
        return None

    def _analyze(self, confl):
        seen = self._seen
        level = self._level
        reason = self._reason
        trail = self._trail
        dl = len(self._trail_lim)
        learnt = [0]
        marked = []
        path = 0
        p = -1
        idx = len(trail) - 1
        c = confl
        while True:
            for q in (c if p == -1 else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    marked.append(v)
                    self._bump_var(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            c = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # local minimisation: drop literals implied by the rest of the clause
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[l >> 1] and level[l >> 1] > 0 for l in r[1:]):
                out.append(q)
        for v in marked:
            seen[v] = 0

        if len(out) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(out)):
                if level[out[k] >> 1] > level[out[best] >> 1]:
                    best = k
            out[1], out[best] = out[best], out[1]
            bt = level[out[1] >> 1]
        lbd = len({level[q >> 1] for q in out})
        return out, bt, lbd

    def _analyze_final(self, p: int) -> tuple[int, ...]:
        """Assumptions responsible for literal ``p`` (an assumption) being false."""
        core = [_lit(p)]
        v0 = p >> 1
        if self._level[v0] == 0:
            return tuple(core)
        seen = self._seen
        seen[v0] = 1
        trail = self._trail
        for k in range(len(trail) - 1, self._trail_lim[0] - 1, -1):
            code = trail[k]
            v = code >> 1
            if not seen[v]:
                continue
            r = self._reason[v]
            if r is None:
                core.append(_lit(code))
            else:
                for q in r[1:]:
                    if self._level[q >> 1] > 0:
                        seen[q >> 1] = 1
            seen[v] = 0
        seen[v0] = 0
        return tuple(core)

    def _reduce_db(self) -> None:
        val = self._val
        reason = self._reason

        def locked(c):
            return val[c[0]] == 1 and reason[c[0] >> 1] is c

        self._learnts.sort(key=lambda c: (c.lbd, -len(c)))
        keep_n = len(self._learnts) // 2
        kept, dropped = [], 0
        for k, c in enumerate(self._learnts):
            if k < keep_n or c.lbd <= 2 or locked(c):
                kept.append(c)
            else:
                c.clear()
                dropped += 1
        self._learnts = kept
        for ws in self._watches:
            if ws:
                ws[:] = [c for c in ws if c]
        log.log(self._log_level, "reduce_db: dropped %d learnt clauses, kept %d",
                dropped, len(kept))

    # -- search ---------------------------------------------------------------

    def _search(self, budget: int, assumptions: list[int]):
        """Returns a SolveResult, or None when the conflict budget is spent."""
        conflicts = 0
        stats = self.stats
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                stats["conflicts"] += 1
                if not self._trail_lim:
                    self._ok = False
                    return SolveResult(False)
                learnt, bt, lbd = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                elif len(learnt) == 2:
                    self._attach(learnt)
                    self._enqueue(learnt[0], self._bins[learnt[1]][-1][1])
                else:
                    c = _Learnt(learnt)
                    c.lbd = lbd
                    self._watches[learnt[0]].append(c)
                    self._watches[learnt[1]].append(c)
                    self._learnts.append(c)
                    self._enqueue(learnt[0], c)
                self._var_inc /= self._var_decay
                continue

            if conflicts >= budget:
                self._cancel_until(0)
                return None
            if len(self._learnts) - len(self._trail) >= self._max_learnts:
                self._reduce_db()

            nxt = -1
            while len(self._trail_lim) < len(assumptions):
                p = assumptions[len(self._trail_lim)]
                if self._val[p] == 1:
                    self._trail_lim.append(len(self._trail))
                elif self._val[p] == 0:
                    return SolveResult(False, core=self._analyze_final(p))
                else:
                    nxt = p
                    break
            if nxt == -1:
                b = self._pick_branch()
                if b is None:
                    val = self._val
                    return SolveResult(True, Model([val[2 * v] == 1 for v in range(1, self.num_vars + 1)]))
                nxt = b
                stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(nxt, None)

    def solve(self, assumptions: Sequence[int] = ()) -> SolveResult:
        for a in assumptions:
            if a == 0 or abs(a) > self.num_vars:
                raise InputError(f"assumption {a} out of range (num_vars={self.num_vars})")
        if not self._ok:
            return SolveResult(False)
        codes = [_code(a) for a in assumptions]
        self._max_learnts = max(self._num_original // 3, 2000)
        budget = float(self.restart_first)
        result = None
        while result is None:
            result = self._search(int(budget), codes)
            if result is None:
                self.stats["restarts"] += 1
                budget *= self.restart_inc
                self._max_learnts = int(self._max_learnts * 1.1)
                log.log(self._log_level, "restart %d: conflicts=%d learnts=%d",
                        self.stats["restarts"], self.stats["conflicts"], len(self._learnts))
        self._cancel_until(0)
        return result


def solve(f: CnfFormula, assumptions: Sequence[int] = (), **options) -> SolveResult:
    """Decide ``f`` under ``assumptions`` with a fresh :class:`Solver`."""
    return Solver(f.num_vars, f.clauses, **options).solve(assumptions)
