"""Command-line front end: ``satcs gen|encode|solve|recover|bench|verify``.

Results go to standard output, progress and diagnostics to standard error.
Exit codes: 0 success/optimum, 2 usage error, 3 unreadable or malformed
input, 10 unsatisfiable/infeasible.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench
from .cnf import emit_wcnf, parse_wcnf
from .encoder import encode_instance, format_var_map
from .maxsat import solve_maxsat
from .model import InputError, ParseError, format_instance, measure, parse_instance, sparsity
from .recovery import METHODS, recover

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_UNSAT = 0, 2, 3, 10


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="ascii", newline="\n")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _load_instance(path: str):
    try:
        return parse_instance(_read(path))
    except ParseError as exc:
        raise _Fail(EXIT_IO, f"{path}: {exc}") from exc


def _bits(v) -> str:
    return " ".join(str(int(b)) for b in v)


def cmd_gen(args) -> int:
    try:
        inst = bench.gen_instance(args.n, args.s, args.pb, args.m, args.seed)
    except (InputError, ValueError, ZeroDivisionError) as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from exc
    _write(args.out, format_instance(inst))
    return EXIT_OK


def cmd_encode(args) -> int:
    enc = encode_instance(_load_instance(args.inp))
    _write(args.out_wcnf, emit_wcnf(enc.wcnf))
    if args.out_map:
        _write(args.out_map, format_var_map(enc.var_map))
    w = enc.wcnf
    print(f"c variables {w.num_vars} hard {len(w.hard)} soft {len(w.soft)} top {w.top}",
          file=sys.stderr if args.out_wcnf in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        w = parse_wcnf(_read(args.wcnf))
    except ParseError as exc:
        raise _Fail(EXIT_IO, f"{args.wcnf}: {exc}") from exc
    res = solve_maxsat(w, on_incumbent=lambda c: print(f"o {c}", flush=True))
    if not res.feasible:
        print("s UNSATISFIABLE")
        return EXIT_UNSAT
    print("s OPTIMUM FOUND")
    print("v " + " ".join(map(str, res.model.literals())) + " 0")
    return EXIT_OK


def cmd_recover(args) -> int:
    inst = _load_instance(args.inp)
    try:
        report = recover(inst, args.method)
    except InputError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from exc
    print(f"method {report.method}")
    if not report.feasible:
        print("s INFEASIBLE")
        return EXIT_UNSAT
    print(f"cost {report.cost}")
    print(f"x {_bits(report.recovered)}")
    if report.exact is not None:
        print(f"exact {'true' if report.exact else 'false'}")
    print(f"time {report.elapsed:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.config:
        try:
            cfg = bench.parse_config(_read(args.config))
        except ParseError as exc:
            raise _Fail(EXIT_USAGE, f"{args.config}: {exc}") from exc
    else:
        cfg = bench.PRESETS[args.preset]
    if args.jobs < 1:
        raise _Fail(EXIT_USAGE, "--jobs must be >= 1")
    overrides = {k: getattr(args, k) for k in ("trials", "seed") if getattr(args, k) is not None}
    try:
        cfg = replace(cfg, **overrides)
    except InputError as exc:
        raise _Fail(EXIT_USAGE, str(exc)) from exc
    rows = bench.run_experiment(cfg, jobs=args.jobs,
                                progress=lambda msg: print(msg, file=sys.stderr, flush=True))
    if args.out in (None, "-"):
        bench.write_csv_stream(rows)
    else:
        try:
            bench.write_csv(rows, args.out)
        except OSError as exc:
            raise _Fail(EXIT_IO, str(exc)) from exc
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.inp)
    digits = args.x.replace(",", " ").split()
    if len(digits) == 1 and len(digits[0]) > 1:
        digits = list(digits[0])
    if any(d not in ("0", "1") for d in digits):
        raise _Fail(EXIT_USAGE, "--x must be a string of 0/1 digits")
    x = np.array([int(d) for d in digits], dtype=np.uint8)
    if x.size != inst.n:
        raise _Fail(EXIT_USAGE, f"signal has {x.size} entries, instance has N={inst.n}")
    feasible = bool(np.array_equal(measure(inst.matrix, x), inst.measurements))
    print(f"feasible {'true' if feasible else 'false'}")
    print(f"sparsity {sparsity(x)}")
    return EXIT_OK if feasible else EXIT_UNSAT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="satcs", description="Exact binary compressive sensing via weighted MaxSAT.",
        epilog="exit codes: 0 success, 2 usage, 3 unreadable input, 10 unsatisfiable/infeasible")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance file")
    g.add_argument("--n", type=int, required=True, help="signal length N")
    g.add_argument("--m", type=int, required=True, help="number of measurements")
    g.add_argument("--s", type=int, required=True, help="signal sparsity")
    g.add_argument("--pb", default="1/2", help="Bernoulli parameter, e.g. 0.5 or 1/2")
    g.add_argument("--seed", type=int, default=0, help="nonnegative integer seed")
    g.add_argument("--out", help="output path (default: stdout)")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("encode", help="encode an instance as WCNF")
    e.add_argument("--in", dest="inp", required=True, help="instance file")
    e.add_argument("--out-wcnf", help="WCNF output path (default: stdout)")
    e.add_argument("--out-map", help="signal variable map output path")
    e.set_defaults(func=cmd_encode)

    s = sub.add_parser("solve", help="solve a WCNF file exactly")
    s.add_argument("--wcnf", required=True, help="WCNF file")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("recover", help="recover the signal of an instance")
    r.add_argument("--in", dest="inp", required=True, help="instance file")
    r.add_argument("--method", choices=METHODS, default="sat", help="recovery method")
    r.set_defaults(func=cmd_recover)

    b = sub.add_parser("bench", help="run an experiment and write CSV")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(bench.PRESETS), help="named experiment")
    src.add_argument("--config", help="key=value experiment file")
    b.add_argument("--out", help="CSV output path (default: stdout)")
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.add_argument("--trials", type=int, help="override trials per point")
    b.add_argument("--seed", type=int, help="override master seed")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check Ax = y for a candidate signal")
    v.add_argument("--in", dest="inp", required=True, help="instance file")
    v.add_argument("--x", required=True, help="candidate signal, e.g. 0110 or '0 1 1 0'")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="c %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"satcs: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
