"""Reduction of a sensing instance to weighted CNF.

Each measurement row ``y_i = <A_i, x>`` becomes a population-count circuit
built from half and full adders over the signal variables in the row's
support.  The circuit output bits are pinned to the binary digits of ``y_i``
(hard clauses) and every signal variable gets a unit soft clause ``-x_j`` of
weight 1, so a minimum-cost model is a sparsest signal consistent with ``y``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .cnf import Clause, Model, WeightedCnf
from .model import InputError, ParseError, SensingInstance, as_signal


@dataclass(frozen=True)
class BitVector:
    """Unsigned integer as literals, least significant bit first."""

    bits: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.bits)

    def value(self, model: Model) -> int:
        return sum(1 << i for i, b in enumerate(self.bits) if model.lit(b))


@dataclass
class EncoderContext:
    """Fresh-variable counter plus the hard clauses emitted so far.

    Variables ``1..num_inputs`` are reserved for the inputs.
    """

    num_inputs: int = 0
    next_var: int = 0
    clauses: list[Clause] = field(default_factory=list)
    adders: int = 0
    _false: int | None = None

    def __post_init__(self):
        self.next_var = max(self.next_var, self.num_inputs + 1)

    @property
    def input_vars(self) -> range:
        return range(1, self.num_inputs + 1)

    @property
    def num_vars(self) -> int:
        return self.next_var - 1

    def new_var(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def false_lit(self) -> int:
        """A literal fixed to false by a unit clause (allocated once)."""
        if self._false is None:
            self._false = self.new_var()
            self.add(-self._false)
        return self._false


def _xor2(ctx: EncoderContext, s: int, a: int, b: int) -> None:
    ctx.add(-a, -b, -s)
    ctx.add(a, b, -s)
    ctx.add(a, -b, s)
    ctx.add(-a, b, s)


def _xor3(ctx: EncoderContext, s: int, a: int, b: int, c: int) -> None:
    # one clause per input pattern, forcing s to that pattern's parity
    for pa in (0, 1):
        for pb in (0, 1):
            for pc in (0, 1):
                parity = pa ^ pb ^ pc
                ctx.add(a if not pa else -a, b if not pb else -b,
                        c if not pc else -c, s if parity else -s)


def encode_half_adder(ctx: EncoderContext, a: int, b: int) -> tuple[int, int]:
    """Return (sum, carry) literals with sum = a xor b, carry = a and b."""
    s, c = ctx.new_var(), ctx.new_var()
    _xor2(ctx, s, a, b)
    ctx.add(-c, a)
    ctx.add(-c, b)
    ctx.add(c, -a, -b)
    ctx.adders += 1
    return s, c


def encode_full_adder(ctx: EncoderContext, a: int, b: int, cin: int) -> tuple[int, int]:
    """Return (sum, carry) with sum = a xor b xor cin, carry = majority(a, b, cin)."""
    s, c = ctx.new_var(), ctx.new_var()
    _xor3(ctx, s, a, b, cin)
    ctx.add(-a, -b, c)
    ctx.add(-a, -cin, c)
    ctx.add(-b, -cin, c)
    ctx.add(a, b, -c)
    ctx.add(a, cin, -c)
    ctx.add(b, cin, -c)
    ctx.adders += 1
    return s, c


def encode_ripple_add(ctx: EncoderContext, u: BitVector, v: BitVector) -> BitVector:
    """u + v with the shorter operand zero-extended; width is max(width) + 1."""
    w = max(u.width, v.width)
    pad = ctx.false_lit()
    ub = u.bits + (pad,) * (w - u.width)
    vb = v.bits + (pad,) * (w - v.width)
    out, carry = [], None
    for a, b in zip(ub, vb):
        if carry is None:
            s, carry = encode_half_adder(ctx, a, b)
        else:
            s, carry = encode_full_adder(ctx, a, b, carry)
        out.append(s)
    return BitVector(tuple(out) + (carry,))


def encode_popcount(ctx: EncoderContext, inputs: Sequence[int]) -> BitVector:
    """Adder tree whose output counts the true literals in ``inputs``.

    Output width is ``floor(log2 k) + 1`` for ``k`` inputs.  Bits are kept in
    one queue per binary weight.  Each queue is reduced first-in first-out:
    full adders consume three bits at a time, and a half adder merges a last
    pair.  Sums stay in the queue and carries move to the next weight, so the
    tree has logarithmic depth and at most ``k`` adders.
    """
    k = len(inputs)
    if k == 0:
        raise InputError("popcount of an empty input sequence")
    width = k.bit_length()
    columns = [deque() for _ in range(width + 1)]
    columns[0].extend(inputs)
    for i in range(width):
        col = columns[i]
        while len(col) >= 3:
            s, c = encode_full_adder(ctx, col.popleft(), col.popleft(), col.popleft())
            col.append(s)
            columns[i + 1].append(c)
        if len(col) == 2:
            s, c = encode_half_adder(ctx, col.popleft(), col.popleft())
            col.append(s)
            columns[i + 1].append(c)
    assert not columns[width], "carry out of the top column"
    return BitVector(tuple(col[0] for col in columns[:width]))


def encode_row(ctx: EncoderContext, row: Sequence[int], x_vars: Sequence[int]) -> BitVector:
    """Popcount of the signal variables selected by a 0/1 matrix row."""
    if len(row) != len(x_vars):
        raise InputError("row length differs from the number of signal variables")
    support = [x for a, x in zip(row, x_vars) if a]
    if not support:
        return BitVector((ctx.false_lit(),))
    return encode_popcount(ctx, support)


def constrain_equal_constant(ctx: EncoderContext, z: BitVector, c: int) -> None:
    """Pin ``z`` to the constant ``c``; adds the empty clause if ``c`` does not fit."""
    if c < 0:
        raise InputError("constant must be nonnegative")
    if c >> z.width:
        ctx.add()
        return
    for i, b in enumerate(z.bits):
        ctx.add(b if (c >> i) & 1 else -b)


@dataclass(frozen=True)
class Encoding:
    wcnf: WeightedCnf
    var_map: tuple[int, ...]       # var_map[j] is the variable of signal entry j
    adders: int = 0


def encode_instance(inst: SensingInstance) -> Encoding:
    n = inst.n
    ctx = EncoderContext(num_inputs=n)
    x_vars = list(ctx.input_vars)
    for row, y in zip(inst.matrix, inst.measurements):
        if not row.any():
            if y:
                ctx.add()         # no signal entry can produce y > 0
            continue
        z = encode_row(ctx, row.tolist(), x_vars)
        constrain_equal_constant(ctx, z, int(y))
    soft = [((-v,), 1) for v in x_vars]
    return Encoding(WeightedCnf(ctx.num_vars, ctx.clauses, soft), tuple(x_vars), ctx.adders)


def decode_model(model: Model, n: int, var_map: Sequence[int] | None = None) -> np.ndarray:
    var_map = range(1, n + 1) if var_map is None else var_map
    return as_signal([int(model[v]) for v in var_map])


def format_var_map(var_map: Sequence[int]) -> str:
    return "".join(f"x {j} {v}\n" for j, v in enumerate(var_map, 1))


def parse_var_map(text: str) -> tuple[int, ...]:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        tok = line.split()
        if not tok:
            continue
        if len(tok) != 3 or tok[0] != "x":
            raise ParseError("expected 'x <j> <var>'", lineno)
        try:
            j, v = int(tok[1]), int(tok[2])
        except ValueError:
            raise ParseError("expected integers", lineno) from None
        if j < 1 or v < 1 or j in entries:
            raise ParseError(f"bad or repeated signal index {j}", lineno)
        entries[j] = v
    if sorted(entries) != list(range(1, len(entries) + 1)):
        raise ParseError("signal indices must be 1..N without gaps")
    return tuple(entries[j] for j in range(1, len(entries) + 1))


def write_encoding(enc: Encoding, wcnf_path, map_path) -> None:
    from .cnf import emit_wcnf

    Path(wcnf_path).write_text(emit_wcnf(enc.wcnf), encoding="ascii", newline="\n")
    Path(map_path).write_text(format_var_map(enc.var_map), encoding="ascii", newline="\n")
