"""Time the numba kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed (JIT warm-up), then ``repeat`` times. The
outputs of both backends are compared for exact equality.
"""
import argparse
import time

import numpy as np

from spni import build_full_qubo, build_sub_qubo, generate_grid, make_spec
from spni import Network, ProblemInstance
from spni.kernels import backends
from spni.subsolve import _schedule


def timed(fn, repeat):
    fn()
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases():
    grid = generate_grid(20, 20, 0).with_budget(2)
    net = grid.network
    indptr, adj_head, adj_arc = net.csr()
    sets = np.random.default_rng(0).integers(0, net.arc_count, size=(2000, 2))
    yield "lengths_for_sets 20x20, 2000 sets", "lengths_for_sets", (
        indptr, adj_head, adj_arc, net.lengths, net.increments, sets, grid.source, grid.sink,
    )

    p3 = ProblemInstance(Network(3, [(0, 1, 2, 3), (1, 2, 4, 1)]), 0, 2, 1)
    q = build_sub_qubo(make_spec(p3, [1, 2], 2, ()))
    yield f"qubo_exhaustive {q.var_count} vars", "qubo_exhaustive", q.to_dense()

    q = build_full_qubo(generate_grid(3, 3, 1).with_budget(2))
    lin, qsym, const, rmat, rconst = q.to_dense()
    sweeps = 500
    betas = _schedule(lin, qsym, sweeps, None)
    rng = np.random.default_rng(1)
    state = rng.integers(0, 2, q.var_count).astype(np.uint8)
    uniforms = rng.random((sweeps, q.var_count))
    yield f"qubo_anneal {q.var_count} vars x {sweeps} sweeps", "qubo_anneal", (
        lin, qsym, const, rmat, rconst, betas, state, uniforms,
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = backends()
    if "numba" not in impls:
        print("numba unavailable; nothing to compare")
        return
    print(f"{'kernel':<42}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}  match")
    for label, name, call_args in cases():
        results = {}
        for backend in ("numba", "numpy"):
            fn = getattr(impls[backend], name)
            # copy so in-place state never leaks between runs
            results[backend] = timed(lambda: fn(*[a.copy() if isinstance(a, np.ndarray) else a for a in call_args]), args.repeat)
        (tn, on), (tp, op) = results["numba"], results["numpy"]
        print(f"{label:<42}{tn * 1e3:>12.2f}{tp * 1e3:>12.2f}{tp / tn:>9.1f}x  {same(on, op)}")


if __name__ == "__main__":
    main()
