import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satcs.bench import (CSV_HEADER, PRESETS, TENTHS, ExperimentConfig, ResultRow, derive_seed,
                         error_vs_compression_experiment, gen_instance, min_measurements,
                         oversampling_experiment, oversampling_factor, parse_config,
                         run_experiment, write_csv, write_csv_stream)
from satcs.model import InputError, ParseError, format_instance, measure


def test_zero_and_full_signals():
    inst = gen_instance(9, 0, "1/2", 5, seed=1)
    assert inst.truth.tolist() == [0] * 9 and inst.measurements.tolist() == [0] * 5
    inst = gen_instance(9, 9, "1/2", 5, seed=1)
    assert inst.truth.tolist() == [1] * 9
    assert inst.measurements.tolist() == inst.matrix.sum(axis=1).tolist()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n), st.sampled_from(["3/10", "1/2", "1"]), st.integers(1, 30),
    st.integers(0, 2 ** 63))))
def test_generation_is_deterministic_and_consistent(args):
    n, s, p, m, seed = args
    a, b = gen_instance(n, s, p, m, seed), gen_instance(n, s, p, m, seed)
    assert format_instance(a) == format_instance(b)
    assert a.truth.sum() == s and a.matrix.shape == (m, n)
    assert np.array_equal(a.measurements, measure(a.matrix, a.truth))
    if p == "1":
        assert a.matrix.all()


def test_seed_changes_instance():
    texts = {format_instance(gen_instance(20, 5, "1/2", 10, seed)) for seed in range(10)}
    assert len(texts) == 10


def test_signal_does_not_depend_on_m():
    # the matrix and the signal come from separate streams
    assert np.array_equal(gen_instance(20, 5, "1/2", 3, 7).truth,
                          gen_instance(20, 5, "1/2", 15, 7).truth)


def test_bernoulli_frequency():
    A = gen_instance(100, 0, "3/10", 100, seed=4).matrix
    assert abs(A.mean() - 0.3) < 0.02


@pytest.mark.parametrize("args", [(5, 6, "1/2", 2, 0), (5, -1, "1/2", 2, 0), (5, 2, "0", 2, 0),
                                  (5, 2, "3/2", 2, 0), (0, 0, "1/2", 2, 0), (5, 2, "1/2", 0, 0),
                                  (5, 2, "1/2", 2, -1)])
def test_generation_rejects_bad_parameters(args):
    with pytest.raises(InputError):
        gen_instance(*args)


def test_derive_seed():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert len({derive_seed(0, k) for k in range(100)}) == 100
    assert 0 <= derive_seed(5) < 2 ** 64


def test_min_measurements_zero_signal():
    for method in ("brute", "sat", "l1"):
        assert min_measurements(method, 8, 0, "1/2", 5, seed=0) == (1, False)


def test_min_measurements_is_first_success():
    from satcs.bench import _all_recovered
    scan = min_measurements("brute", 10, 2, "1/2", 4, seed=3)
    assert not scan.failed
    assert _all_recovered("brute", 10, 2, "1/2", scan.m_min, 4, 3)
    assert not any(_all_recovered("brute", 10, 2, "1/2", m, 4, 3) for m in range(1, scan.m_min))


def test_min_measurements_failure_reports_n():
    # with p_B = 1 every row is all-ones, so only the weight of x is observable
    assert min_measurements("sat", 6, 2, "1", 3, seed=0) == (6, True)


def test_sat_needs_no_more_measurements_than_l1_small():
    wins = sum(min_measurements("sat", 16, 2, "1/2", 10, seed).m_min
               <= min_measurements("l1", 16, 2, "1/2", 10, seed).m_min for seed in range(5))
    assert wins >= 4


def test_oversampling_factor_definition():
    n, s = 30, 3
    m = s * math.log(n / s)
    assert oversampling_factor(m, n, s) == pytest.approx(1.0)
    assert oversampling_factor(12, 30, 3) == pytest.approx(12 / (3 * math.log(10)))


def test_oversampling_experiment_rows():
    cfg = ExperimentConfig("oversampling", (10, 10), (Fraction(1, 5),), Fraction(1, 2), trials=2,
                           methods=("brute", "l1"))
    rows = oversampling_experiment(cfg)
    assert [r.method for r in rows] == ["brute", "l1"]
    for r in rows:
        assert r.s == 2 and r.n == 10 and r.metric == pytest.approx(oversampling_factor(r.m, 10, 2))
    assert rows == oversampling_experiment(cfg)


def test_oversampling_rejects_degenerate_rate():
    cfg = ExperimentConfig("oversampling", (10, 10), (Fraction(1),), Fraction(1, 2), trials=1)
    with pytest.raises(InputError):
        oversampling_experiment(cfg)


def test_error_experiment_small():
    cfg = ExperimentConfig("error", (8, 10), (Fraction(3, 10),), Fraction(1, 2), trials=3,
                           methods=("sat", "brute"), compression_rates=(Fraction(1, 2), Fraction(1)))
    rows = error_vs_compression_experiment(cfg)
    assert len(rows) == 4
    assert all(r.n == (8, 10) and 0 <= r.metric <= 1 for r in rows)
    full = [r for r in rows if r.m == 1]
    assert all(r.metric == 0 for r in full)
    assert rows == run_experiment(cfg)


def test_error_experiment_zero_signal():
    cfg = ExperimentConfig("error", (5, 5), (Fraction(1, 20),), Fraction(1, 2), trials=2,
                           methods=("sat", "l1"), compression_rates=(Fraction(1, 5),))
    # s/N = 1/20 rounds to s = 0 at N = 5
    assert all(r.metric == 0 for r in error_vs_compression_experiment(cfg))


def test_presets():
    f3, f4, f5 = PRESETS["fig3"], PRESETS["fig4"], PRESETS["fig5"]
    assert f3.n_range == (30, 30) and f3.bernoulli_p == Fraction(1, 2)
    assert f3.sparsity_rates == tuple(Fraction(k, 10) for k in range(1, 6))
    assert (f4.bernoulli_p, f4.sparsity_rates, f4.n_range) == (Fraction(1, 2), (Fraction(1, 2),), (20, 30))
    assert (f5.bernoulli_p, f5.sparsity_rates) == (Fraction(3, 10), (Fraction(3, 10),))
    assert f4.compression_rates == TENTHS and f4.trials == 10


@pytest.mark.parametrize("kwargs", [dict(trials=0), dict(sparsity_rates=(Fraction(0),)),
                                    dict(bernoulli_p=Fraction(0)), dict(methods=("magic",)),
                                    dict(kind="other"), dict(n_range=(10, 5)), dict(seed=-1)])
def test_config_validation(kwargs):
    base = dict(kind="oversampling", n_range=(10, 10), sparsity_rates=(Fraction(1, 5),),
                bernoulli_p=Fraction(1, 2))
    with pytest.raises(InputError):
        ExperimentConfig(**{**base, **kwargs})


def test_parse_config():
    cfg = parse_config("preset = fig4\n# comment\ntrials = 3\nseed=7\nn = 20-25\n"
                       "compression_rates = 0.5, 1\nmethods = sat\n")
    assert cfg.kind == "error" and cfg.trials == 3 and cfg.seed == 7
    assert cfg.n_range == (20, 25) and cfg.compression_rates == (Fraction(1, 2), Fraction(1))
    assert cfg.methods == ("sat",)
    assert parse_config("") == PRESETS["fig3"]
    assert parse_config("sparsity_rates = 1/10, 3/10").sparsity_rates == (Fraction(1, 10),
                                                                          Fraction(3, 10))


@pytest.mark.parametrize("text, lineno", [("trials 3\n", 1), ("\ncolour = red\n", 2),
                                          ("trials = x\n", 1), ("preset = fig9\n", 1)])
def test_parse_config_errors(text, lineno):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.lineno == lineno


def test_parse_config_invalid_values():
    with pytest.raises(ParseError):
        parse_config("trials = 0\n")


def sample_rows():
    return [ResultRow("sat", 30, 3, Fraction(1, 2), 10, 10 / (3 * math.log(10)), 10, 0),
            ResultRow("l1", 30, 15, Fraction(1, 2), 18, 18 / (15 * math.log(2)), 10, 0),
            ResultRow("sat", (20, 30), Fraction(1, 2), Fraction(3, 10), Fraction(1, 10),
                      Fraction(7, 30), 10, 4)]


def test_csv_round_trip(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(sample_rows(), path)
    text = path.read_text()
    assert text.splitlines()[0] == "method,N,s,p_B,m,metric,trials,seed"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert [r["method"] for r in rows] == ["sat", "l1", "sat"]
    assert rows[2]["N"] == "20-30" and rows[2]["m"] == "0.1" and rows[2]["p_B"] == "0.3"
    for raw, row in zip(rows, sample_rows()):
        assert float(raw["metric"]) == pytest.approx(float(row.metric), rel=1e-5)
        assert len(raw["metric"].replace(".", "").lstrip("0")) <= 6
        assert int(raw["trials"]) == row.trials and int(raw["seed"]) == row.seed
    buf = io.StringIO()
    write_csv_stream(sample_rows(), buf)
    assert buf.getvalue() == text


def test_csv_reports_path_on_failure(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_csv(sample_rows(), tmp_path / "missing" / "out.csv")
