"""Greedy initial solution and decomposition-based refinement.

Each step partitions the network, solves one block subproblem per sink node
on the current shortest route (plus the route found at start-up), and
recombines the block solutions into global candidates scored by the true
s-t distance. Sub-solves within a sweep are independent and can run on a
thread pool; each uses a generator seeded from (master seed, step, sink),
and results are merged in sink-id order, so output does not depend on the
worker count.
"""
from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InputError, UnreachableError
from .graph import UNREACHABLE, ProblemInstance, calc_length, calc_path
from .partition import Partitioning, find_block, partition
from .subsolve import BBExact, SubSolverKind, make_spec, solve_sub


@dataclass(frozen=True)
class RefineConfig:
    n: int = 20
    lam: int = 50
    subsolver: SubSolverKind = BBExact()
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"block size n must be >= 1, got {self.n}")
        if self.lam < 0:
            raise InputError(f"iteration count must be >= 0, got {self.lam}")
        if self.seed < 0:
            raise InputError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    objective: int
    solution_size: int
    candidates: int
    good_arcs: int
    millis: float


TRACE_HEADER = ("iteration", "objective", "solution_size", "candidates", "good_arcs", "millis")


@dataclass
class RefineTrace:
    rows: list[TraceRow] = field(default_factory=list)

    def objectives(self) -> list[int]:
        return [r.objective for r in self.rows]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            for r in self.rows:
                w.writerow([r.iteration, r.objective, r.solution_size, r.candidates, r.good_arcs, f"{r.millis:.3f}"])


class _Pool:
    """Runs sub-solves serially or on a thread pool, preserving input order."""

    def __init__(self, workers: int):
        self.workers = workers
        self._ex = ThreadPoolExecutor(workers) if workers > 1 else None

    def map(self, fn, items):
        if self._ex is None:
            return [fn(i) for i in items]
        return list(self._ex.map(fn, items))

    def close(self):
        if self._ex is not None:
            self._ex.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _task_seed(key: tuple, sink: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([*key, sink])


def _solve_all(inst, parts, nodes, base, kind, key, pool):
    def job(node):
        block = parts.blocks[find_block(parts, node)]
        spec = make_spec(inst, block, node, base)
        sol = solve_sub(spec, kind, np.random.default_rng(_task_seed(key, node)))
        return sol, calc_length(inst, sol)

    order = sorted(nodes)
    return order, pool.map(job, order)


def _dedupe(sols):
    seen, out = set(), []
    for s in sols:
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def sweep(
    inst: ProblemInstance,
    parts: Partitioning,
    nodes: Iterable[int],
    base: Iterable[int],
    kind: SubSolverKind = BBExact(),
    key: tuple = (0,),
    pool: _Pool | None = None,
):
    """Solve one subproblem per sink in ``nodes`` and keep the longest results.

    Returns ``(best_length, candidates)``: the largest s-t length among the
    baseline ``base`` and all recombined solutions, and the distinct
    solutions reaching it in sink-id order (the baseline first if it ties).
    """
    base = frozenset(base)
    best = calc_length(inst, base)
    if best is UNREACHABLE:
        raise UnreachableError("sink unreachable under the base solution")
    cands = [base]
    own = pool is None
    pool = pool or _Pool(1)
    try:
        _, results = _solve_all(inst, parts, nodes, base, kind, key, pool)
    finally:
        if own:
            pool.close()
    for sol, length in results:
        if length > best:
            best, cands = length, [sol]
        elif length == best:
            cands.append(sol)
    return best, _dedupe(cands)


def _pick(cands, rng):
    return cands[int(rng.integers(len(cands)))]


def _master_rng(cfg: RefineConfig, phase: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, phase])


def initial_solution(inst: ProblemInstance, cfg: RefineConfig, pool=None) -> frozenset:
    """Greedy construction adding at most one interdicted arc per budget unit."""
    current: frozenset = frozenset()
    if inst.budget == 0:
        return current
    if calc_length(inst, current) is UNREACHABLE:
        raise UnreachableError(f"sink {inst.sink} unreachable from source {inst.source}")
    rng = _master_rng(cfg, 0)
    prev_nodes = calc_path(inst, current)
    own = pool is None
    pool = pool or _Pool(cfg.workers)
    try:
        for step in range(1, inst.budget + 1):
            parts = partition(inst.network, cfg.n, rng)
            nodes = calc_path(inst, current) | prev_nodes
            _, cands = sweep(inst, parts, nodes, current, cfg.subsolver, (cfg.seed, 0, step), pool)
            current = _pick(cands, rng)
    finally:
        if own:
            pool.close()
    return current


def refine(
    inst: ProblemInstance,
    cfg: RefineConfig,
    solution: Iterable[int],
    trace: RefineTrace | None = None,
    pool=None,
) -> frozenset:
    """Improve ``solution`` for ``cfg.lam`` iterations; never lowers the s-t length.

    Each iteration re-partitions and sweeps. If no candidate improves the
    length, each interdicted arc not yet in good-arcs is tentatively dropped
    and the sweep repeated from the reduced set; the first sink whose
    solution beats the current length is adopted and the drop becomes
    permanent. Arcs whose drop helps no sink join good-arcs, which is reset
    whenever the solution changes.
    """
    current = frozenset(solution)
    if len(current) > inst.budget:
        raise InputError(f"solution uses {len(current)} arcs, budget is {inst.budget}")
    if cfg.lam == 0:
        return current
    rng = _master_rng(cfg, 1)
    prev_nodes = calc_path(inst, current)
    good: set[int] = set()
    own = pool is None
    pool = pool or _Pool(cfg.workers)
    try:
        for it in range(1, cfg.lam + 1):
            t0 = time.perf_counter()
            parts = partition(inst.network, cfg.n, rng)
            nodes = calc_path(inst, current) | prev_nodes
            prev_len = calc_length(inst, current)
            best, cands = sweep(inst, parts, nodes, current, cfg.subsolver, (cfg.seed, 1, it, 0), pool)
            if best > prev_len:
                current = _pick(cands, rng)
                good.clear()
            else:
                for arc in sorted(current - good):
                    reduced = current - {arc}
                    _, results = _solve_all(
                        inst, parts, nodes, reduced, cfg.subsolver, (cfg.seed, 1, it, arc + 1), pool
                    )
                    better = next((sol for sol, length in results if length > prev_len), None)
                    if better is not None:
                        current = better
                        good.clear()
                        break
                    good.add(arc)
            if trace is not None:
                trace.rows.append(
                    TraceRow(
                        it,
                        calc_length(inst, current),
                        len(current),
                        len(cands),
                        len(good),
                        (time.perf_counter() - t0) * 1000.0,
                    )
                )
    finally:
        if own:
            pool.close()
    return current


def solve_spni(inst: ProblemInstance, cfg: RefineConfig) -> tuple[frozenset, RefineTrace]:
    """Greedy start followed by refinement; trace row 0 records the start."""
    trace = RefineTrace()
    with _Pool(cfg.workers) as pool:
        t0 = time.perf_counter()
        start = initial_solution(inst, cfg, pool=pool)
        length = calc_length(inst, start)
        if length is UNREACHABLE:
            raise UnreachableError(f"sink {inst.sink} unreachable from source {inst.source}")
        trace.rows.append(TraceRow(0, length, len(start), 0, 0, (time.perf_counter() - t0) * 1000.0))
        best = refine(inst, cfg, start, trace, pool=pool)
    return best, trace
