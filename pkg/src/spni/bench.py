"""Whole-problem baselines, the quality ratio and the experiment harness."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapacityError, UnreachableError
from .graph import UNREACHABLE, ProblemInstance, calc_length
from .instance import budget_from_fraction, generate_grid
from .refine import RefineConfig, solve_spni
from .subsolve import BBExact, SubSolverKind, branch_and_bound, make_spec

log = logging.getLogger(__name__)

DEFAULT_CAP = 2_000_000

BENCH_HEADER = (
    "size",
    "seed",
    "budget",
    "r",
    "f",
    "quality",
    "refine_ms",
    "baseline_ms",
    "baseline_timed_out",
)


def subset_count(arc_count: int, budget: int) -> int:
    return sum(math.comb(arc_count, k) for k in range(budget + 1))


def brute_force_optimum(inst: ProblemInstance, cap: int = DEFAULT_CAP) -> tuple[frozenset, int]:
    """Enumerate every interdiction set of size <= budget.

    Returns the lexicographically smallest optimal set and its length.
    """
    m, r0 = inst.network.arc_count, inst.budget
    total = subset_count(m, r0)
    if total > cap:
        raise CapacityError(f"{total} interdiction sets exceed the enumeration cap {cap}")
    if calc_length(inst, ()) is UNREACHABLE:
        raise UnreachableError(f"sink {inst.sink} unreachable from source {inst.source}")
    net = inst.network
    indptr, adj_head, adj_arc = net.csr()
    best_len, best_set = -1, ()
    for k in range(r0 + 1):
        # each size class is lexicographically ordered; batch it for the kernel
        combos = combinations(range(m), k)
        while True:
            chunk = list(_take(combos, 65536))
            if not chunk:
                break
            sets = np.array(chunk, dtype=np.int64).reshape(len(chunk), k)
            if k == 0:
                sets = np.full((len(chunk), 1), -1, dtype=np.int64)
            lengths = kernels.lengths_for_sets(
                indptr, adj_head, adj_arc, net.lengths, net.increments, sets, inst.source, inst.sink
            )
            i = int(np.argmax(lengths))
            top = int(lengths[i])
            if top > best_len or (top == best_len and chunk[i] < best_set):
                best_len, best_set = top, chunk[i]
    return frozenset(best_set), best_len


def _take(it, n):
    for _, v in zip(range(n), it):
        yield v


def full_bb(inst: ProblemInstance, timeout: float | None = None) -> tuple[frozenset, int, bool]:
    """Branch-and-bound on the whole network with an optional wall-clock limit.

    On timeout the incumbent is returned with ``optimal=False``.
    """
    if calc_length(inst, ()) is UNREACHABLE:
        raise UnreachableError(f"sink {inst.sink} unreachable from source {inst.source}")
    spec = make_spec(inst, range(inst.network.node_count), inst.sink, ())
    deadline = None if timeout is None else time.monotonic() + timeout
    res = branch_and_bound(spec, deadline)
    return res.chosen, calc_length(inst, res.chosen), res.optimal


def quality(r: int, f: int) -> Fraction:
    """``(r - f) / max(r, f)``; positive when the refinement length ``r`` wins."""
    if r == 0 and f == 0:
        return Fraction(0)
    return Fraction(r - f, max(r, f))


@dataclass(frozen=True)
class Preset:
    budget_fraction: float
    n: int
    lam: int
    label: str


PRESETS = {
    "A": Preset(0.0025, 20, 50, "budget 0.25% of arcs, n=20"),
    "B": Preset(0.005, 20, 50, "budget 0.5% of arcs, n=20"),
    "B-caption": Preset(0.05, 20, 50, "budget 5% of arcs, n=20"),
    "C": Preset(0.0025, 40, 50, "budget 0.25% of arcs, n=40"),
}


@dataclass(frozen=True)
class BenchConfig:
    sizes: Sequence[int]  # grid side lengths
    seeds: Sequence[int]
    budget_fraction: float | None = 0.0025
    budget: int | None = None  # fixed budget, overrides the fraction
    n: int = 20
    lam: int = 50
    subsolver: SubSolverKind = BBExact()
    timeout_mode: str = "refine"  # "refine", "fixed" or "oracle"
    timeout: float = 60.0
    oracle_cap: int = DEFAULT_CAP


def bench_row(side: int, seed: int, cfg: BenchConfig) -> dict:
    inst = generate_grid(side, side, seed)
    m = inst.network.arc_count
    r0 = min(cfg.budget, m) if cfg.budget is not None else budget_from_fraction(m, cfg.budget_fraction)
    inst = inst.with_budget(r0)
    row = {"size": inst.network.node_count, "seed": seed, "budget": r0}
    t0 = time.perf_counter()
    sol, trace = solve_spni(inst, RefineConfig(cfg.n, cfg.lam, cfg.subsolver, seed))
    refine_s = time.perf_counter() - t0
    r = calc_length(inst, sol)
    t1 = time.perf_counter()
    if cfg.timeout_mode == "oracle":
        _, f = brute_force_optimum(inst, cfg.oracle_cap)
        timed_out = False
    else:
        limit = refine_s if cfg.timeout_mode == "refine" else cfg.timeout
        _, f, optimal = full_bb(inst, limit)
        timed_out = not optimal
    baseline_s = time.perf_counter() - t1
    row.update(
        r=r,
        f=f,
        quality=quality(r, f),
        refine_ms=refine_s * 1000,
        baseline_ms=baseline_s * 1000,
        baseline_timed_out=timed_out,
        trace=trace,
    )
    return row


def run_benchmark(cfg: BenchConfig) -> list[dict]:
    """One row per (size, seed) in config order; failed rows carry ``error``."""
    if cfg.timeout_mode not in ("refine", "fixed", "oracle"):
        raise ValueError(f"unknown timeout mode {cfg.timeout_mode!r}")
    rows = []
    for side in cfg.sizes:
        for seed in cfg.seeds:
            try:
                rows.append(bench_row(side, seed, cfg))
            except Exception as e:  # a failed row is recorded, not fatal
                log.warning("row size=%s seed=%s failed: %s", side, seed, e)
                rows.append({"size": side * side + 2, "seed": seed, "error": str(e)})
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for row in rows:
        if "error" in row:
            w.writerow([row["size"], row["seed"]] + [""] * (len(BENCH_HEADER) - 2))
            continue
        w.writerow(
            [
                row["size"],
                row["seed"],
                row["budget"],
                row["r"],
                row["f"],
                f"{float(row['quality']):.6f}",
                f"{row['refine_ms']:.1f}",
                f"{row['baseline_ms']:.1f}",
                str(row["baseline_timed_out"]).lower(),
            ]
        )
    return buf.getvalue()
