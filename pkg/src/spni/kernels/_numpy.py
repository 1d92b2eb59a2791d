"""Pure Python / numpy implementations of the hot kernels.

These are the fallback path when numba is unavailable or disabled with
``SPNI_KERNELS=numpy``. Every function here has a jitted twin in
``_numba.py`` that must return identical results.
"""
import heapq
import math

import numpy as np

INF = np.iinfo(np.int64).max // 4


def dijkstra(indptr, adj_head, adj_arc, weight, source):
    """Single-source shortest paths over a CSR graph with integer weights.

    ``weight`` is indexed by arc id (``adj_arc`` maps CSR slots to arc ids).
    Ties on distance go to the smallest-id predecessor node that was settled
    before the target, so the predecessor tree is deterministic and acyclic.

    Returns ``(dist, pred_node, pred_arc)``; unreachable nodes keep ``INF``
    and ``-1`` predecessors.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, INF, dtype=np.int64)
    pred_node = np.full(n, -1, dtype=np.int64)
    pred_arc = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=np.bool_)
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if settled[u] or d > dist[u]:
            continue
        settled[u] = True
        for p in range(indptr[u], indptr[u + 1]):
            v = adj_head[p]
            if settled[v]:
                continue
            k = adj_arc[p]
            nd = d + weight[k]
            if nd < dist[v]:
                dist[v] = nd
                pred_node[v] = u
                pred_arc[v] = k
                heapq.heappush(heap, (nd, int(v)))
            elif nd == dist[v] and u < pred_node[v]:
                pred_node[v] = u
                pred_arc[v] = k
    return dist, pred_node, pred_arc


def lengths_for_sets(indptr, adj_head, adj_arc, c, d, sets, source, sink):
    """s-t distance for each row of ``sets`` (arc ids, padded with -1).

    Returns -1 where the sink is unreachable.
    """
    out = np.empty(sets.shape[0], dtype=np.int64)
    for r in range(sets.shape[0]):
        w = c.copy()
        row = sets[r]
        row = row[row >= 0]
        w[row] = c[row] + d[row]  # duplicates count once
        dist, _, _ = dijkstra(indptr, adj_head, adj_arc, w, source)
        out[r] = -1 if dist[sink] >= INF else dist[sink]
    return out


def qubo_exhaustive(lin, qsym, const, resid_mat, resid_const, chunk=1 << 15):
    """Evaluate every assignment of a small QUBO.

    ``qsym`` is the symmetric coupling matrix with zero diagonal, so the value
    of bits ``b`` is ``const + lin.b + b.qsym.b / 2``. An assignment is feasible
    when every residual ``resid_const + resid_mat @ b`` is zero.

    Returns ``(best_feasible_value, best_feasible_code, n_feasible,
    best_infeasible_value, n_infeasible)``. Ties go to the smallest code,
    where bit ``v`` of the code is variable ``v``.
    """
    nv = lin.shape[0]
    total = 1 << nv
    shifts = np.arange(nv, dtype=np.int64)
    qhalf = np.triu(qsym)
    best_f, best_code, n_f = -INF, -1, 0
    best_i, n_i = -INF, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (codes[:, None] >> shifts) & 1
        values = const + bits @ lin + np.einsum("ij,jk,ik->i", bits, qhalf, bits)
        if resid_mat.shape[0]:
            feasible = ~np.any(bits @ resid_mat.T + resid_const, axis=1)
        else:
            feasible = np.ones(codes.shape[0], dtype=np.bool_)
        cnt = int(feasible.sum())
        if cnt:
            fv = values[feasible]
            j = int(np.argmax(fv))
            if fv[j] > best_f:
                best_f, best_code = int(fv[j]), int(codes[feasible][j])
            n_f += cnt
        if cnt < codes.shape[0]:
            iv = values[~feasible].max()
            best_i = max(best_i, int(iv))
            n_i += codes.shape[0] - cnt
    return best_f, best_code, n_f, best_i, n_i


def qubo_anneal(lin, qsym, const, resid_mat, resid_const, betas, state, uniforms):
    """One single-flip annealing run (maximization) from ``state``.

    ``uniforms`` has shape ``(len(betas), nv)``; random numbers are drawn by
    the caller so both backends consume the same stream.

    Returns ``(best_state, best_value, feas_state, feas_value, found_feasible)``.
    """
    nv = lin.shape[0]
    npen = resid_mat.shape[0]
    b = state.astype(np.int64).copy()
    field = lin + qsym @ b
    value = int(const + lin @ b + (b @ qsym @ b) // 2)
    resid = resid_const + resid_mat @ b
    nonzero = int(np.count_nonzero(resid))
    best_state, best_value = b.copy(), value
    feas_state, feas_value, found = b.copy(), -INF, False
    if nonzero == 0:
        feas_value, found = value, True
    for s in range(betas.shape[0]):
        beta = betas[s]
        for j in range(nv):
            sign = 1 - 2 * b[j]
            delta = sign * field[j]
            if delta >= 0 or uniforms[s, j] < math.exp(beta * delta):
                b[j] += sign
                value += delta
                field += sign * qsym[:, j]
                if npen:
                    before = resid != 0
                    resid += sign * resid_mat[:, j]
                    nonzero += int(np.count_nonzero(resid != 0)) - int(before.sum())
                if value > best_value:
                    best_value = value
                    best_state[:] = b
                if nonzero == 0 and value > feas_value:
                    feas_value = value
                    feas_state[:] = b
                    found = True
    return best_state, best_value, feas_state, feas_value, found
