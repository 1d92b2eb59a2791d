"""Random subproblem specs shared by the subsolver tests."""
import numpy as np

from spni import generate_grid, make_spec, partition


def random_spec(rng, rows=None, cols=None, max_scope=12, budget=None):
    rows = rows or int(rng.integers(2, 5))
    cols = cols or int(rng.integers(2, 5))
    while True:
        inst = generate_grid(rows, cols, int(rng.integers(1 << 30)))
        m = inst.network.arc_count
        r0 = budget if budget is not None else int(rng.integers(0, 4))
        inst = inst.with_budget(min(r0, m))
        parts = partition(inst.network, int(rng.integers(2, 9)), rng)
        block = parts.blocks[int(rng.integers(len(parts.blocks)))]
        sink = sorted(block)[int(rng.integers(len(block)))]
        base = rng.choice(m, size=int(rng.integers(0, inst.budget + 1)), replace=False)
        spec = make_spec(inst, block, sink, base.tolist())
        if 0 < len(spec.arcs) <= max_scope:
            return spec


def specs(count, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_spec(rng, **kw) for _ in range(count)]
