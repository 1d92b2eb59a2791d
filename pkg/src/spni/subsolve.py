"""Block subproblems: formulation, exact and QUBO-based solvers.

A subproblem fixes the labels of nodes outside a block to their current
shortest-path distances and lets the solver re-choose interdictions on arcs
whose head lies in the block, within the budget not spent elsewhere.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from . import kernels
from .errors import CapacityError, InputError
from .graph import ProblemInstance, _csr, all_labels, pi_upper_bound
from .qubo import build_sub_qubo, code_to_bits, decode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BBExact:
    """Exact branch-and-bound on the combinatorial subproblem."""


@dataclass(frozen=True)
class QuboExhaustive:
    """Enumerate every assignment of the block QUBO.

    When the QUBO has more than ``max_bits`` variables, fall back to
    :class:`BBExact` (``fallback=True``) or raise :class:`CapacityError`.
    """

    max_bits: int = 24
    fallback: bool = True

    def __post_init__(self):
        if not 0 <= self.max_bits <= 30:
            raise InputError(f"max_bits must be in [0, 30], got {self.max_bits}")


@dataclass(frozen=True)
class QuboAnneal:
    """Single-flip simulated annealing on the block QUBO.

    ``schedule`` is ``(beta_hot, beta_cold)`` for a geometric inverse
    temperature ramp; ``None`` derives it from the coefficient magnitudes.
    """

    sweeps: int = 1000
    restarts: int = 4
    schedule: tuple[float, float] | None = None

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise InputError("sweeps and restarts must be >= 1")


SubSolverKind = Union[BBExact, QuboExhaustive, QuboAnneal]


@dataclass(frozen=True)
class _LocalGraph:
    indptr: np.ndarray
    adj_head: np.ndarray
    adj_arc: np.ndarray
    base_w: np.ndarray
    incr: np.ndarray
    arc_id: np.ndarray  # global arc id per local arc, -1 for the source link
    slot: dict  # global arc id -> local arc index
    root: int
    sink: int


@dataclass(frozen=True)
class SubproblemSpec:
    inst: ProblemInstance
    block: frozenset
    sink: int
    base: frozenset
    gamma: np.ndarray
    local_budget: int
    internal: tuple  # arcs with both ends in the block
    external: tuple  # arcs entering the block from outside
    _local: _LocalGraph = field(repr=False, compare=False)

    @property
    def arcs(self) -> tuple:
        """All arcs whose head is in the block, by id."""
        return tuple(sorted(self.internal + self.external))


def make_spec(inst: ProblemInstance, block: Iterable[int], sink: int, base: Iterable[int]) -> SubproblemSpec:
    block = frozenset(int(v) for v in block)
    base = frozenset(int(k) for k in base)
    if sink not in block:
        raise InputError(f"sink {sink} not in block")
    if len(base) > inst.budget:
        raise InputError(f"base solution uses {len(base)} arcs, budget is {inst.budget}")
    net = inst.network
    gamma = all_labels(inst, base)
    gamma.setflags(write=False)
    internal, external = [], []
    for k, (u, v) in enumerate(zip(net.tails.tolist(), net.heads.tolist())):
        if v in block:
            (internal if u in block else external).append(k)
    scope = set(internal) | set(external)
    local_budget = inst.budget - len(base - scope)

    nodes = sorted(block)
    loc = {v: i for i, v in enumerate(nodes)}
    root = len(nodes)
    tails, heads, base_w, incr, arc_id = [], [], [], [], []
    for k in internal:
        tails.append(loc[int(net.tails[k])])
        heads.append(loc[int(net.heads[k])])
        base_w.append(int(net.lengths[k]))
        incr.append(int(net.increments[k]))
        arc_id.append(k)
    if inst.source in block:
        tails.append(root)
        heads.append(loc[inst.source])
        base_w.append(0)
        incr.append(0)
        arc_id.append(-1)
    for k in external:
        tails.append(root)
        heads.append(loc[int(net.heads[k])])
        base_w.append(int(gamma[net.tails[k]]) + int(net.lengths[k]))
        incr.append(int(net.increments[k]))
        arc_id.append(k)
    as_arr = lambda a: np.array(a, dtype=np.int64)  # noqa: E731
    indptr, adj_head, adj_arc = _csr(root + 1, as_arr(tails), as_arr(heads))
    arc_id = as_arr(arc_id)
    local = _LocalGraph(
        indptr,
        adj_head,
        adj_arc,
        as_arr(base_w),
        as_arr(incr),
        arc_id,
        {int(k): i for i, k in enumerate(arc_id) if k >= 0},
        root,
        loc[sink],
    )
    return SubproblemSpec(inst, block, sink, base, gamma, local_budget, tuple(internal), tuple(external), local)


def _evaluate(spec: SubproblemSpec, chosen: Iterable[int], want_path: bool = False):
    g = spec._local
    w = g.base_w.copy()
    for k in chosen:
        i = g.slot[k]
        w[i] += g.incr[i]
    dist, pred_node, pred_arc = kernels.dijkstra(g.indptr, g.adj_head, g.adj_arc, w, g.root)
    cap = pi_upper_bound(spec.inst)
    d = int(dist[g.sink])
    if d >= cap:
        return cap, []
    if not want_path:
        return d, []
    path = []
    v = g.sink
    while v != g.root:
        i = int(pred_arc[v])
        if g.arc_id[i] >= 0:
            path.append(int(g.arc_id[i]))
        v = int(pred_node[v])
    return d, path


def local_distance(spec: SubproblemSpec, local_x: Iterable[int]) -> int:
    """Sink label of the block after interdicting ``local_x`` (capped at the label bound)."""
    local_x = frozenset(int(k) for k in local_x)
    if len(local_x) > spec.local_budget:
        raise InputError(f"{len(local_x)} interdictions exceed local budget {spec.local_budget}")
    stray = local_x - set(spec._local.slot)
    if stray:
        raise InputError(f"arcs {sorted(stray)} are not in the block's arc set")
    return _evaluate(spec, local_x)[0]


class _Timeout(Exception):
    pass


@dataclass
class BBResult:
    chosen: frozenset
    value: int
    optimal: bool
    nodes: int


def branch_and_bound(spec: SubproblemSpec, deadline: float | None = None) -> BBResult:
    """Depth-first search over interdiction sets in lexicographic order.

    Children of a set ``S`` add one arc with a larger id than ``max(S)``, so
    preorder visits sets in lexicographic order and the first set reaching
    the optimum is the lexicographically smallest one. A child is pruned when
    interdicting it together with every later arc cannot beat the incumbent,
    and arcs beyond the last undecided arc of the current shortest route are
    never branched on (interdicting only off-route arcs cannot help).
    """
    cands = list(spec.arcs)
    pos = {k: i for i, k in enumerate(cands)}
    cap = pi_upper_bound(spec.inst)
    root_val, _ = _evaluate(spec, ())
    best = [root_val, ()]
    count = [0]

    def search(chosen, value, start, left):
        count[0] += 1
        if deadline is not None and time.monotonic() >= deadline:
            raise _Timeout
        if left == 0 or value >= cap:
            return
        _, path = _evaluate(spec, chosen, want_path=True)
        reach = [pos[k] for k in path if pos[k] >= start]
        if not reach:
            return
        for p in range(start, max(reach) + 1):
            child = chosen + (cands[p],)
            if left > 1:
                bound, _ = _evaluate(spec, child + tuple(cands[p + 1 :]))
                if bound <= best[0]:
                    continue
            val, _ = _evaluate(spec, child)
            if val > best[0]:
                best[0], best[1] = val, child
            if left > 1:
                search(child, val, p + 1, left - 1)

    optimal = True
    try:
        search((), root_val, 0, spec.local_budget)
    except _Timeout:
        optimal = False
    return BBResult(frozenset(best[1]), best[0], optimal, count[0])


def bb_exact(spec: SubproblemSpec) -> frozenset:
    """Lexicographically smallest arc set maximizing :func:`local_distance`."""
    return branch_and_bound(spec).chosen


def _schedule(lin, qsym, sweeps, schedule):
    if schedule is None:
        field_mag = np.abs(lin) + np.abs(qsym).sum(axis=1)
        coeffs = np.concatenate([np.abs(lin), np.abs(qsym[np.triu_indices_from(qsym, 1)])])
        coeffs = coeffs[coeffs > 0]
        if field_mag.max(initial=0) == 0:
            return np.ones(sweeps)
        hot = math.log(2) / float(field_mag.max())
        cold = math.log(100) / float(coeffs.min())
    else:
        hot, cold = schedule
    if sweeps == 1:
        return np.array([cold], dtype=np.float64)
    return np.geomspace(hot, cold, sweeps)


def qubo_anneal(q, params: QuboAnneal, rng) -> tuple[np.ndarray, int]:
    """Best assignment (by QUBO value) over all restarts, and its value.

    Feasible states seen along the way are recorded too; see :func:`anneal_runs`.
    """
    runs = anneal_runs(q, params, rng)
    best = max(runs, key=lambda r: r[1])
    return best[0], best[1]


def anneal_runs(q, params: QuboAnneal, rng):
    """Per-restart ``(best_state, best_value, feasible_state_or_None, feasible_value)``."""
    rng = np.random.default_rng(rng)
    lin, qsym, const, rmat, rconst = q.to_dense()
    nv = q.var_count
    betas = _schedule(lin, qsym, params.sweeps, params.schedule)
    out = []
    for _ in range(params.restarts):
        state = rng.integers(0, 2, size=nv).astype(np.uint8)
        uniforms = rng.random((params.sweeps, nv))
        bs, bv, fs, fv, found = kernels.qubo_anneal(lin, qsym, const, rmat, rconst, betas, state, uniforms)
        out.append((np.asarray(bs, dtype=np.uint8), int(bv), np.asarray(fs, dtype=np.uint8) if found else None, int(fv)))
    return out


def _qubo_choice(spec: SubproblemSpec, kind, rng) -> frozenset:
    q = build_sub_qubo(spec)
    if isinstance(kind, QuboExhaustive):
        if q.var_count > kind.max_bits:
            msg = f"block QUBO has {q.var_count} variables, limit is {kind.max_bits}"
            if not kind.fallback:
                raise CapacityError(msg)
            log.warning("%s; falling back to branch-and-bound", msg)
            return bb_exact(spec)
        best_f, code, n_f, _, _ = kernels.qubo_exhaustive(*q.to_dense())
        if not n_f:
            raise RuntimeError("block QUBO has no feasible assignment")
        return decode(q, code_to_bits(int(code), q.var_count)).x

    best, best_val = frozenset(), None
    fallback = None
    for state, value, feas, _ in anneal_runs(q, kind, rng):
        if feas is not None:
            x = decode(q, feas).x
            val = _evaluate(spec, x)[0]
            if best_val is None or val > best_val:
                best, best_val = x, val
        elif fallback is None or value > fallback[1]:
            fallback = (state, value)
    if best_val is None and fallback is not None:
        x = decode(q, fallback[0]).x
        if len(x) <= spec.local_budget:
            best = x
    return best


def solve_sub(spec: SubproblemSpec, kind: SubSolverKind = BBExact(), rng=None) -> frozenset:
    """New global interdiction set: arcs outside the block kept, block arcs re-chosen."""
    if isinstance(kind, BBExact):
        chosen = bb_exact(spec)
    elif isinstance(kind, (QuboExhaustive, QuboAnneal)):
        chosen = _qubo_choice(spec, kind, rng)
    else:
        raise InputError(f"unknown subsolver {kind!r}")
    keep = spec.base - set(spec.arcs)
    return frozenset(keep | chosen)
