"""numba-compiled kernels; must agree exactly with ``_numpy.py``."""
import math

import numpy as np
from numba import njit

INF = np.iinfo(np.int64).max // 4


@njit(cache=True, nogil=True)
def _heap_push(hd, hv, size, d, v):
    i = size
    hd[i] = d
    hv[i] = v
    while i > 0:
        parent = (i - 1) >> 1
        if hd[parent] < hd[i] or (hd[parent] == hd[i] and hv[parent] <= hv[i]):
            break
        hd[parent], hd[i] = hd[i], hd[parent]
        hv[parent], hv[i] = hv[i], hv[parent]
        i = parent
    return size + 1


@njit(cache=True, nogil=True)
def _heap_pop(hd, hv, size):
    d = hd[0]
    v = hv[0]
    size -= 1
    hd[0] = hd[size]
    hv[0] = hv[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        m = left
        right = left + 1
        if right < size and (hd[right] < hd[left] or (hd[right] == hd[left] and hv[right] < hv[left])):
            m = right
        if hd[i] < hd[m] or (hd[i] == hd[m] and hv[i] <= hv[m]):
            break
        hd[m], hd[i] = hd[i], hd[m]
        hv[m], hv[i] = hv[i], hv[m]
        i = m
    return d, v, size


@njit(cache=True, nogil=True)
def dijkstra(indptr, adj_head, adj_arc, weight, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, INF, dtype=np.int64)
    pred_node = np.full(n, -1, dtype=np.int64)
    pred_arc = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=np.bool_)
    cap = adj_head.shape[0] + 1
    hd = np.empty(cap, dtype=np.int64)
    hv = np.empty(cap, dtype=np.int64)
    dist[source] = 0
    size = _heap_push(hd, hv, 0, 0, source)
    while size > 0:
        d, u, size = _heap_pop(hd, hv, size)
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
                size = _heap_push(hd, hv, size, nd, v)
            elif nd == dist[v] and u < pred_node[v]:
                pred_node[v] = u
                pred_arc[v] = k
    return dist, pred_node, pred_arc


@njit(cache=True, nogil=True)
def lengths_for_sets(indptr, adj_head, adj_arc, c, d, sets, source, sink):
    out = np.empty(sets.shape[0], dtype=np.int64)
    w = np.empty_like(c)
    for r in range(sets.shape[0]):
        w[:] = c
        for j in range(sets.shape[1]):
            k = sets[r, j]
            if k >= 0:
                w[k] = c[k] + d[k]
        dist, _, _ = dijkstra(indptr, adj_head, adj_arc, w, source)
        out[r] = -1 if dist[sink] >= INF else dist[sink]
    return out


@njit(cache=True, nogil=True)
def qubo_exhaustive(lin, qsym, const, resid_mat, resid_const):
    nv = lin.shape[0]
    npen = resid_mat.shape[0]
    b = np.zeros(nv, dtype=np.int64)
    field = lin.copy()
    resid = resid_const.copy()
    nonzero = 0
    for t in range(npen):
        if resid[t] != 0:
            nonzero += 1
    value = const
    code = 0
    best_f, best_code, n_f = -INF, -1, 0
    best_i, n_i = -INF, 0
    total = 1 << nv
    for step in range(total):
        if step > 0:
            # Gray code: flip the lowest set bit position of ``step``
            j = 0
            while (step >> j) & 1 == 0:
                j += 1
            sign = 1 - 2 * b[j]
            value += sign * field[j]
            b[j] += sign
            code ^= 1 << j
            for i in range(nv):
                field[i] += sign * qsym[i, j]
            for t in range(npen):
                a = resid_mat[t, j]
                if a != 0:
                    old = resid[t]
                    resid[t] = old + sign * a
                    if old == 0:
                        nonzero += 1
                    elif resid[t] == 0:
                        nonzero -= 1
        if nonzero == 0:
            n_f += 1
            if value > best_f or (value == best_f and code < best_code):
                best_f = value
                best_code = code
        else:
            n_i += 1
            if value > best_i:
                best_i = value
    return best_f, best_code, n_f, best_i, n_i


@njit(cache=True, nogil=True)
def qubo_anneal(lin, qsym, const, resid_mat, resid_const, betas, state, uniforms):
    nv = lin.shape[0]
    npen = resid_mat.shape[0]
    b = state.astype(np.int64)
    field = lin.copy()
    for j in range(nv):
        if b[j]:
            for i in range(nv):
                field[i] += qsym[i, j]
    value = const
    for j in range(nv):
        if b[j]:
            value += lin[j]
            for i in range(j + 1, nv):
                if b[i]:
                    value += qsym[i, j]
    resid = resid_const.copy()
    for t in range(npen):
        for j in range(nv):
            resid[t] += resid_mat[t, j] * b[j]
    nonzero = 0
    for t in range(npen):
        if resid[t] != 0:
            nonzero += 1
    best_state = b.copy()
    best_value = value
    feas_state = b.copy()
    feas_value = -INF
    found = False
    if nonzero == 0:
        feas_value = value
        found = True
    for s in range(betas.shape[0]):
        beta = betas[s]
        for j in range(nv):
            sign = 1 - 2 * b[j]
            delta = sign * field[j]
            if delta >= 0 or uniforms[s, j] < math.exp(beta * delta):
                b[j] += sign
                value += delta
                for i in range(nv):
                    field[i] += sign * qsym[i, j]
                for t in range(npen):
                    a = resid_mat[t, j]
                    if a != 0:
                        old = resid[t]
                        resid[t] = old + sign * a
                        if old == 0:
                            nonzero += 1
                        elif resid[t] == 0:
                            nonzero -= 1
                if value > best_value:
                    best_value = value
                    best_state[:] = b
                if nonzero == 0 and value > feas_value:
                    feas_value = value
                    feas_state[:] = b
                    found = True
    return best_state, best_value, feas_state, feas_value, found
