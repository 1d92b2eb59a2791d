from fractions import Fraction

import pytest

from spni import CapacityError, brute_force_optimum, full_bb, generate_grid, quality, run_benchmark
from spni.bench import BENCH_HEADER, BenchConfig, rows_to_csv

from .oracles import oracle_optimum


def test_brute_force_examples(p3, d4):
    assert brute_force_optimum(p3) == ({0}, 9)
    assert brute_force_optimum(d4)[1] == 12
    assert brute_force_optimum(p3.with_budget(0)) == (frozenset(), 6)
    with pytest.raises(CapacityError):
        brute_force_optimum(d4, cap=5)


def test_brute_force_matches_plain_enumeration():
    for seed in range(4):
        inst = generate_grid(3, 3, seed).with_budget(2)
        val, combo = oracle_optimum(inst)
        got_set, got_val = brute_force_optimum(inst)
        assert got_val == val and tuple(sorted(got_set)) == combo


def test_full_bb(p3):
    assert full_bb(p3, 10.0) == ({0}, 9, True)
    sol, f, optimal = full_bb(p3, 0.0)
    assert not optimal and f == 6
    inst = generate_grid(5, 5, 0).with_budget(2)
    assert full_bb(inst, 60.0)[1] == brute_force_optimum(inst)[1]


def test_quality():
    assert quality(9, 9) == 0
    assert quality(9, 10) == Fraction(-1, 10)
    assert quality(10, 9) == Fraction(1, 10)
    assert quality(0, 0) == 0


def test_benchmark_oracle_rows():
    cfg = BenchConfig(sizes=[3], seeds=[0, 1], budget=2, n=6, lam=3, timeout_mode="oracle")
    rows = run_benchmark(cfg)
    assert [r["seed"] for r in rows] == [0, 1]
    for r in rows:
        assert r["size"] == 11 and r["quality"] <= 0
        objs = r["trace"].objectives()
        assert objs == sorted(objs)
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(BENCH_HEADER)
    assert len(text.splitlines()) == 3


def test_failed_row_is_recorded():
    cfg = BenchConfig(sizes=[3], seeds=[0], budget=3, n=6, lam=1, timeout_mode="oracle", oracle_cap=2)
    rows = run_benchmark(cfg)
    assert "error" in rows[0]
    assert rows_to_csv(rows).splitlines()[1] == "11,0,,,,,,,"


def test_bad_timeout_mode():
    with pytest.raises(ValueError):
        run_benchmark(BenchConfig(sizes=[3], seeds=[0], timeout_mode="never"))
