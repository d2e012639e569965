"""Domain types for binary compressive sensing.

Signals and design matrices are plain numpy arrays of ``uint8`` holding 0/1
entries.  They are validated and frozen (``writeable = False``) on the way in,
so every value handed around by this package is safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class ParseError(InputError):
    """Malformed text input; carries the offending 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_signal(bits) -> np.ndarray:
    """Validate ``bits`` as a binary signal and return a read-only copy."""
    x = np.array(bits, dtype=np.int64, copy=True).reshape(-1)
    if x.size < 1:
        raise InputError("signal must have length >= 1")
    if np.any((x != 0) & (x != 1)):
        raise InputError("signal entries must be 0 or 1")
    return _frozen(x.astype(np.uint8))


def as_matrix(entries) -> np.ndarray:
    A = np.array(entries, dtype=np.int64, copy=True)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InputError(f"design matrix must be a non-empty 2-d array, got shape {A.shape}")
    if np.any((A != 0) & (A != 1)):
        raise InputError("design matrix entries must be 0 or 1")
    return _frozen(A.astype(np.uint8))


def as_measurements(values, n: int) -> np.ndarray:
    y = np.array(values, dtype=np.int64, copy=True).reshape(-1)
    if np.any(y < 0) or np.any(y > n):
        raise InputError(f"measurements must lie in [0, {n}]")
    return _frozen(y)


def measure(A, x) -> np.ndarray:
    """Return ``y = A x`` for binary ``A`` and ``x``."""
    A = np.asarray(A)
    x = np.asarray(x)
    if A.ndim != 2 or x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise InputError(f"cannot measure signal of shape {x.shape} with matrix of shape {A.shape}")
    return _frozen(A.astype(np.int64) @ x.astype(np.int64))


def sparsity(x) -> int:
    return int(np.count_nonzero(np.asarray(x)))


def recovery_error(x, xhat) -> Fraction:
    """Fraction of positions where ``xhat`` differs from ``x``."""
    x = np.asarray(x)
    xhat = np.asarray(xhat)
    if x.shape != xhat.shape or x.ndim != 1:
        raise InputError(f"signal shapes differ: {x.shape} vs {xhat.shape}")
    return Fraction(int(np.count_nonzero(x != xhat)), x.shape[0])


@dataclass(frozen=True, eq=False)
class SensingInstance:
    """A design matrix, its measurements and (optionally) the signal behind them."""

    matrix: np.ndarray
    measurements: np.ndarray
    truth: np.ndarray | None = None
    seed: int = 0
    bernoulli_p: Fraction | None = None
    sparsity: int | None = None

    def __post_init__(self):
        A = as_matrix(self.matrix)
        y = as_measurements(self.measurements, A.shape[1])
        if y.shape[0] != A.shape[0]:
            raise InputError(f"{y.shape[0]} measurements for a matrix with {A.shape[0]} rows")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "measurements", y)
        if self.truth is not None:
            x = as_signal(self.truth)
            if not np.array_equal(measure(A, x), y):
                raise InputError("truth is inconsistent with the measurements")
            if self.sparsity is not None and self.sparsity != sparsity(x):
                raise InputError("stated sparsity differs from the truth's")
            object.__setattr__(self, "truth", x)
            object.__setattr__(self, "sparsity", sparsity(x))

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SensingInstance):
            return NotImplemented
        same_truth = (self.truth is None and other.truth is None) or (
            self.truth is not None
            and other.truth is not None
            and np.array_equal(self.truth, other.truth)
        )
        return (
            np.array_equal(self.matrix, other.matrix)
            and np.array_equal(self.measurements, other.measurements)
            and same_truth
        )

    __hash__ = None


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of one recovery run.

    ``recovered`` and ``cost`` are ``None`` when the method found no feasible
    signal; ``exact`` is ``None`` when the instance carries no ground truth.
    """

    method: str
    recovered: np.ndarray | None
    cost: int | None
    exact: bool | None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def feasible(self) -> bool:
        return self.recovered is not None

    def error(self, truth) -> Fraction:
        """Recovery error against ``truth``; an infeasible run counts as 1."""
        if self.recovered is None:
            return Fraction(1)
        return recovery_error(truth, self.recovered)


def make_report(method: str, recovered, truth, elapsed: float) -> RecoveryReport:
    if recovered is None:
        return RecoveryReport(method, None, None, None if truth is None else False, elapsed)
    x = as_signal(recovered)
    exact = None if truth is None else bool(np.array_equal(x, truth))
    return RecoveryReport(method, x, sparsity(x), exact, elapsed)


# -- instance text format ----------------------------------------------------

def _digits(v) -> str:
    return " ".join(str(int(b)) for b in v)


def format_instance(inst: SensingInstance) -> str:
    lines = [f"cs {inst.m} {inst.n}", "y " + _digits(inst.measurements)]
    lines.extend(_digits(row) for row in inst.matrix)
    if inst.truth is not None:
        lines.append("x " + _digits(inst.truth))
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_instance(text: str) -> SensingInstance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty instance", 1)
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != "cs":
        raise ParseError("expected header 'cs <m> <N>'", 1)
    m, n = _ints(head[1:], 1)
    if m < 1 or n < 1:
        raise ParseError("dimensions must be positive", 1)
    if len(lines) not in (m + 2, m + 3):
        raise ParseError(f"expected {m + 2} or {m + 3} lines, got {len(lines)}", len(lines))
    ytok = lines[1].split(" ")
    if ytok[0] != "y" or len(ytok) != m + 1:
        raise ParseError(f"expected 'y' followed by {m} integers", 2)
    y = _ints(ytok[1:], 2)
    rows = []
    for i in range(m):
        tok = lines[2 + i].split(" ")
        if len(tok) != n:
            raise ParseError(f"expected {n} matrix entries", 3 + i)
        rows.append(_ints(tok, 3 + i))
    truth = None
    if len(lines) == m + 3:
        xtok = lines[m + 2].split(" ")
        if xtok[0] != "x" or len(xtok) != n + 1:
            raise ParseError(f"expected 'x' followed by {n} digits", m + 3)
        truth = _ints(xtok[1:], m + 3)
    try:
        return SensingInstance(rows, y, truth)
    except InputError as exc:
        raise ParseError(str(exc)) from exc


def read_instance(path) -> SensingInstance:
    return parse_instance(Path(path).read_text(encoding="ascii"))


def write_instance(inst: SensingInstance, path) -> None:
    Path(path).write_text(format_instance(inst), encoding="ascii", newline="\n")
