"""Clauses, CNF and weighted CNF with DIMACS (CNF / classic WCNF) I/O.

Literals are non-zero signed ints in the DIMACS convention: ``v`` is variable
``v`` and ``-v`` its negation.  A clause is a tuple of literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import InputError, ParseError

Clause = tuple[int, ...]


def make_clause(lits: Iterable[int]) -> Clause:
    """Tuple of ``lits`` with repeated literals dropped (first occurrence kept)."""
    clause = tuple(dict.fromkeys(int(l) for l in lits))
    if 0 in clause:
        raise InputError("0 is not a literal")
    return clause


def _max_var(clauses: Iterable[Clause]) -> int:
    return max((abs(l) for c in clauses for l in c), default=0)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __init__(self, num_vars: int, clauses: Iterable[Iterable[int]] = ()):
        cls = tuple(make_clause(c) for c in clauses)
        if num_vars < 0 or _max_var(cls) > num_vars:
            raise InputError(f"clause variable exceeds num_vars={num_vars}")
        object.__setattr__(self, "num_vars", int(num_vars))
        object.__setattr__(self, "clauses", cls)


@dataclass(frozen=True)
class WeightedCnf:
    """Hard clauses plus (clause, weight) soft clauses."""

    num_vars: int
    hard: tuple[Clause, ...]
    soft: tuple[tuple[Clause, int], ...]

    def __init__(self, num_vars: int, hard: Iterable[Iterable[int]] = (),
                 soft: Iterable[tuple[Iterable[int], int]] = ()):
        h = tuple(make_clause(c) for c in hard)
        s = tuple((make_clause(c), int(w)) for c, w in soft)
        if any(w < 1 for _, w in s):
            raise InputError("soft weights must be positive integers")
        if num_vars < 0 or max(_max_var(h), _max_var(c for c, _ in s)) > num_vars:
            raise InputError(f"clause variable exceeds num_vars={num_vars}")
        object.__setattr__(self, "num_vars", int(num_vars))
        object.__setattr__(self, "hard", h)
        object.__setattr__(self, "soft", s)

    @property
    def top(self) -> int:
        """Weight marking hard clauses: one more than all soft weights together."""
        return 1 + sum(w for _, w in self.soft)


class Model:
    """A total truth assignment over variables ``1..num_vars``."""

    __slots__ = ("_values",)

    def __init__(self, values: Sequence[bool]):
        self._values = tuple(bool(v) for v in values)

    @classmethod
    def from_literals(cls, lits: Iterable[int]) -> Model:
        lits = list(lits)
        n = max((abs(l) for l in lits), default=0)
        values: list[bool | None] = [None] * n
        for l in lits:
            values[abs(l) - 1] = l > 0
        if None in values:
            raise InputError("literal list does not assign every variable")
        return cls(values)

    @property
    def num_vars(self) -> int:
        return len(self._values)

    def __getitem__(self, var: int) -> bool:
        if not 1 <= var <= len(self._values):
            raise InputError(f"variable {var} not assigned by this model")
        return self._values[var - 1]

    def lit(self, lit: int) -> bool:
        return self[abs(lit)] == (lit > 0)

    def literals(self) -> list[int]:
        return [v if b else -v for v, b in enumerate(self._values, 1)]

    def restrict(self, num_vars: int) -> Model:
        return Model(self._values[:num_vars])

    def __eq__(self, other):
        return isinstance(other, Model) and self._values == other._values

    def __hash__(self):
        return hash(self._values)

    def __repr__(self):
        return f"Model({self.literals()})"


def _check_total(num_vars: int, m: Model) -> None:
    if m.num_vars < num_vars:
        raise InputError(f"model covers {m.num_vars} of {num_vars} variables")


def clause_satisfied(clause: Clause, m: Model) -> bool:
    return any(m.lit(l) for l in clause)


def evaluate(f: CnfFormula, m: Model) -> bool:
    _check_total(f.num_vars, m)
    return all(clause_satisfied(c, m) for c in f.clauses)


def soft_cost(w: WeightedCnf, m: Model) -> int:
    """Total weight of soft clauses falsified by ``m``."""
    _check_total(w.num_vars, m)
    return sum(wt for c, wt in w.soft if not clause_satisfied(c, m))


def satisfies_hard(w: WeightedCnf, m: Model) -> bool:
    _check_total(w.num_vars, m)
    return all(clause_satisfied(c, m) for c in w.hard)


# -- DIMACS -------------------------------------------------------------------

def _clause_line(c: Clause) -> str:
    return " ".join(map(str, c + (0,)))


def emit_dimacs_cnf(f: CnfFormula) -> str:
    out = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    out.extend(_clause_line(c) for c in f.clauses)
    return "\n".join(out) + "\n"


def emit_wcnf(w: WeightedCnf) -> str:
    top = w.top
    out = [f"p wcnf {w.num_vars} {len(w.hard) + len(w.soft)} {top}"]
    out.extend(f"{top} {_clause_line(c)}" for c in w.hard)
    out.extend(f"{wt} {_clause_line(c)}" for c, wt in w.soft)
    return "\n".join(out) + "\n"


def _body(text: str):
    """Yield (lineno, tokens) for non-comment, non-blank lines."""
    for lineno, line in enumerate(text.splitlines(), 1):
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        yield lineno, tok


def _parse_literals(tok, lineno: int, num_vars: int) -> Clause:
    try:
        lits = [int(t) for t in tok]
    except ValueError:
        raise ParseError("non-integer token in clause", lineno) from None
    if not lits or lits[-1] != 0 or 0 in lits[:-1]:
        raise ParseError("clause must be terminated by a single 0", lineno)
    lits.pop()
    if any(abs(l) > num_vars for l in lits):
        raise ParseError(f"literal exceeds num_vars={num_vars}", lineno)
    return make_clause(lits)


def _header(lines, kind: str, arity: int):
    try:
        lineno, tok = next(lines)
    except StopIteration:
        raise ParseError(f"missing 'p {kind}' header", 1) from None
    if len(tok) != 2 + arity or tok[:2] != ["p", kind]:
        raise ParseError(f"malformed 'p {kind}' header", lineno)
    try:
        vals = [int(t) for t in tok[2:]]
    except ValueError:
        raise ParseError(f"malformed 'p {kind}' header", lineno) from None
    if any(v < 0 for v in vals):
        raise ParseError("negative count in header", lineno)
    return lineno, vals


def parse_dimacs_cnf(text: str) -> CnfFormula:
    lines = _body(text)
    hline, (num_vars, num_clauses) = _header(lines, "cnf", 2)
    clauses = [_parse_literals(tok, lineno, num_vars) for lineno, tok in lines]
    if len(clauses) != num_clauses:
        raise ParseError(f"header declares {num_clauses} clauses, found {len(clauses)}", hline)
    return CnfFormula(num_vars, clauses)


def parse_wcnf(text: str) -> WeightedCnf:
    lines = _body(text)
    hline, (num_vars, num_clauses, top) = _header(lines, "wcnf", 3)
    hard, soft = [], []
    for lineno, tok in lines:
        try:
            weight = int(tok[0])
        except ValueError:
            raise ParseError("clause weight must be an integer", lineno) from None
        if weight < 1 or weight > top:
            raise ParseError(f"weight {weight} outside [1, top={top}]", lineno)
        clause = _parse_literals(tok[1:], lineno, num_vars)
        if weight == top:
            hard.append(clause)
        else:
            soft.append((clause, weight))
    if len(hard) + len(soft) != num_clauses:
        raise ParseError(
            f"header declares {num_clauses} clauses, found {len(hard) + len(soft)}", hline)
    return WeightedCnf(num_vars, hard, soft)
