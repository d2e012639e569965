"""Random instances and the two recovery experiments.

Randomness: every stream is numpy's Philox-4x64-10 counter-based generator
whose 128-bit key comes from ``numpy.random.SeedSequence([seed, stream])``.
Stream 0 fills the design matrix row-major (entry ``(i, j)`` is the
``i*N + j``-th uniform draw, so it depends only on ``(seed, i, j)`` for a
fixed ``N``); stream 1 draws the support of the signal.  Per-instance seeds
are derived from the experiment's master seed with :func:`derive_seed`.
"""

from __future__ import annotations

import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .model import InputError, ParseError, SensingInstance, measure
from .recovery import METHODS, brute_force_l0, recover

__all__ = [
    "ExperimentConfig", "ResultRow", "PRESETS", "brute_force_l0", "derive_seed",
    "error_vs_compression_experiment", "gen_instance", "min_measurements",
    "oversampling_experiment", "parse_config", "read_config", "run_experiment", "write_csv",
]

CSV_HEADER = ("method", "N", "s", "p_B", "m", "metric", "trials", "seed")
TENTHS = tuple(Fraction(k, 10) for k in range(1, 11))


def derive_seed(*keys: int) -> int:
    """Deterministic 64-bit seed from a tuple of nonnegative integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])


def _stream(seed: int, stream: int) -> np.random.Generator:
    key = np.random.SeedSequence([int(seed), stream]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gen_instance(n: int, s: int, p_b, m: int, seed: int) -> SensingInstance:
    """Bernoulli(p_b) design matrix with ``m`` rows and a uniform weight-``s`` signal."""
    p_b = Fraction(p_b)
    if n < 1 or m < 1:
        raise InputError("N and m must be positive")
    if not 0 <= s <= n:
        raise InputError(f"sparsity {s} outside [0, {n}]")
    if not 0 < p_b <= 1:
        raise InputError(f"Bernoulli parameter {p_b} outside (0, 1]")
    if seed < 0:
        raise InputError("seed must be nonnegative")
    A = (_stream(seed, 0).random((m, n)) < float(p_b)).astype(np.uint8)
    x = np.zeros(n, dtype=np.uint8)
    x[_stream(seed, 1).choice(n, size=s, replace=False)] = 1
    return SensingInstance(A, measure(A, x), x, seed=seed, bernoulli_p=p_b, sparsity=s)


def _round(q: Fraction) -> int:
    return math.floor(q + Fraction(1, 2))


class Scan(NamedTuple):
    m_min: int
    failed: bool       # True when no m <= N recovered every trial


def _all_recovered(method: str, n: int, s: int, p_b, m: int, trials: int, seed: int) -> bool:
    for t in range(trials):
        inst = gen_instance(n, s, p_b, m, derive_seed(seed, n, s, m, t))
        if not recover(inst, method).exact:
            return False
    return True


def min_measurements(method: str, n: int, s: int, p_b, trials: int, seed: int) -> Scan:
    """Smallest m for which ``method`` exactly recovers all ``trials`` fresh instances.

    Candidates are scanned upward from 1, each with its own instances; when
    nothing up to ``N`` succeeds the result is ``Scan(N, failed=True)``.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    for m in range(1, n + 1):
        if _all_recovered(method, n, s, p_b, m, trials, seed):
            return Scan(m, False)
    return Scan(n, True)


@dataclass(frozen=True)
class ResultRow:
    method: str
    n: int | tuple[int, int]
    s: int | Fraction            # count, or sparsity rate for ranged N
    p_b: Fraction
    m: int | Fraction            # m_min, or compression rate m/N
    metric: float | Fraction
    trials: int
    seed: int
    failed: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str                                   # "oversampling" or "error"
    n_range: tuple[int, int]
    sparsity_rates: tuple[Fraction, ...]
    bernoulli_p: Fraction
    trials: int = 10
    seed: int = 0
    methods: tuple[str, ...] = ("sat", "l1")
    compression_rates: tuple[Fraction, ...] = TENTHS

    def __post_init__(self):
        if self.kind not in ("oversampling", "error"):
            raise InputError(f"unknown experiment kind {self.kind!r}")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise InputError(f"bad N range {self.n_range}")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        for r in (*self.sparsity_rates, *self.compression_rates):
            if not 0 < r <= 1:
                raise InputError(f"rate {r} outside (0, 1]")
        if not 0 < self.bernoulli_p <= 1:
            raise InputError("bernoulli_p outside (0, 1]")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")
        for meth in self.methods:
            if meth not in METHODS:
                raise InputError(f"unknown method {meth!r}")


PRESETS = {
    "fig3": ExperimentConfig("oversampling", (30, 30), tuple(Fraction(k, 10) for k in range(1, 6)),
                             Fraction(1, 2)),
    "fig4": ExperimentConfig("error", (20, 30), (Fraction(1, 2),), Fraction(1, 2)),
    "fig5": ExperimentConfig("error", (20, 30), (Fraction(3, 10),), Fraction(3, 10)),
    "smoke": ExperimentConfig("oversampling", (10, 10), (Fraction(1, 5), Fraction(2, 5)),
                              Fraction(1, 2), trials=3),
}


def _map(fn, items, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _oversampling_cell(args):
    method, n, s, p_b, trials, seed = args
    return min_measurements(method, n, s, p_b, trials, seed)


def oversampling_factor(m: int, n: int, s: int) -> float:
    """m / (s ln(N/s))."""
    return m / (s * math.log(n / s))


def oversampling_experiment(cfg: ExperimentConfig, *, jobs: int = 1,
                            progress: Callable[[str], None] | None = None) -> list[ResultRow]:
    n = cfg.n_range[0]
    if cfg.n_range[1] != n:
        raise InputError("the oversampling experiment needs a single N")
    cells = []
    for rate in cfg.sparsity_rates:
        s = _round(rate * n)
        if not 0 < s < n:
            raise InputError(f"sparsity rate {rate} gives s={s}; need 0 < s < N")
        cells.extend((meth, n, s, cfg.bernoulli_p, cfg.trials, cfg.seed) for meth in cfg.methods)
    rows = []
    for cell, scan in zip(cells, _map(_oversampling_cell, cells, jobs)):
        meth, _, s, *_ = cell
        if progress:
            progress(f"{meth} N={n} s={s}: m_min={scan.m_min}{' (failed)' if scan.failed else ''}")
        rows.append(ResultRow(meth, n, s, cfg.bernoulli_p, scan.m_min,
                              oversampling_factor(scan.m_min, n, s), cfg.trials, cfg.seed,
                              scan.failed))
    return sorted(rows, key=_row_key)


def _error_trial(args):
    method, n, s, p_b, m, seed = args
    inst = gen_instance(n, s, p_b, m, seed)
    return recover(inst, method).error(inst.truth)


def error_vs_compression_experiment(cfg: ExperimentConfig, *, jobs: int = 1,
                                    progress: Callable[[str], None] | None = None
                                    ) -> list[ResultRow]:
    """Mean recovery error per (method, sparsity rate, compression rate).

    Trial ``t`` uses signal length ``N_t`` drawn from ``cfg.n_range`` (the same
    for every compression rate), so all points share their signal sizes.
    """
    lo, hi = cfg.n_range
    sizes = [lo + derive_seed(cfg.seed, 1, t) % (hi - lo + 1) for t in range(cfg.trials)]
    rows = []
    for si, s_rate in enumerate(cfg.sparsity_rates):
        for k, c_rate in enumerate(cfg.compression_rates):
            for meth in cfg.methods:
                cells = [(meth, n, _round(s_rate * n), cfg.bernoulli_p, max(1, _round(c_rate * n)),
                          derive_seed(cfg.seed, 2, si, k, t)) for t, n in enumerate(sizes)]
                errors = _map(_error_trial, cells, jobs)
                mean = sum(errors, Fraction(0)) / len(errors)
                if progress:
                    progress(f"{meth} s/N={s_rate} m/N={c_rate}: mean error {float(mean):.4f}")
                n_label = lo if lo == hi else (lo, hi)
                rows.append(ResultRow(meth, n_label, s_rate, cfg.bernoulli_p, c_rate, mean,
                                      cfg.trials, cfg.seed))
    return sorted(rows, key=_row_key)


def run_experiment(cfg: ExperimentConfig, **kwargs) -> list[ResultRow]:
    if cfg.kind == "oversampling":
        return oversampling_experiment(cfg, **kwargs)
    return error_vs_compression_experiment(cfg, **kwargs)


def _row_key(row: ResultRow):
    n = row.n if isinstance(row.n, tuple) else (row.n, row.n)
    return (row.method, n, Fraction(row.s), Fraction(row.m))


# -- output and configuration --------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, tuple):
        return f"{v[0]}-{v[1]}"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".6g")


def write_csv(rows, path) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            _write_rows(rows, fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _write_rows(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.method, _fmt(r.n), _fmt(r.s), _fmt(r.p_b), _fmt(r.m), _fmt(r.metric),
                    r.trials, r.seed])


def write_csv_stream(rows, fh=None) -> None:
    _write_rows(rows, sys.stdout if fh is None else fh)


def _fractions(value: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(v.strip()) for v in value.split(",") if v.strip())


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """``key = value`` lines (``#`` comments) on top of ``base`` or the fig3 preset.

    Keys: preset, kind, n (``30`` or ``20-30``), sparsity_rates, compression_rates
    (comma-separated, ``0.5`` or ``1/2``), bernoulli_p, trials, seed, methods.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ParseError("expected 'key = value'", lineno)
        values[key] = (lineno, value)

    cfg = base or PRESETS["fig3"]
    if "preset" in values:
        lineno, name = values.pop("preset")
        if name not in PRESETS:
            raise ParseError(f"unknown preset {name!r}", lineno)
        cfg = PRESETS[name]
    changes = {}
    for key, (lineno, value) in values.items():
        try:
            if key == "kind":
                changes["kind"] = value
            elif key == "n":
                lo, _, hi = value.partition("-")
                changes["n_range"] = (int(lo), int(hi or lo))
            elif key == "sparsity_rates":
                changes["sparsity_rates"] = _fractions(value)
            elif key == "compression_rates":
                changes["compression_rates"] = _fractions(value)
            elif key == "bernoulli_p":
                changes["bernoulli_p"] = Fraction(value)
            elif key in ("trials", "seed"):
                changes[key] = int(value)
            elif key == "methods":
                changes["methods"] = tuple(v.strip() for v in value.split(",") if v.strip())
            else:
                raise ParseError(f"unknown key {key!r}", lineno)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad value for {key!r}: {value!r}", lineno) from None
    try:
        return replace(cfg, **changes)
    except InputError as exc:
        raise ParseError(str(exc)) from exc


def read_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
