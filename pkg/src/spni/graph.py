"""Directed networks and interdiction-aware shortest path queries."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InputError, UnreachableError

InterdictionSet = frozenset
"""A set of interdicted arc ids (``frozenset[int]``)."""


class _Unreachable:
    __slots__ = ()

    def __repr__(self) -> str:
        return "UNREACHABLE"

    def __reduce__(self):
        return "UNREACHABLE"


UNREACHABLE = _Unreachable()
"""Returned by :func:`calc_length` when no s-t path exists."""


def _csr(node_count: int, tails: np.ndarray, heads: np.ndarray):
    order = np.argsort(tails, kind="stable")
    counts = np.bincount(tails, minlength=node_count)
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, heads[order].astype(np.int64), order.astype(np.int64)


class Network:
    """Directed multigraph with integer arc lengths and interdiction increments.

    Arc ``k`` is ``(tails[k], heads[k])`` with length ``lengths[k]`` and
    increment ``increments[k]``. Arc ids are list positions and never change.
    """

    def __init__(self, node_count: int, arcs: Iterable[Sequence[int]]):
        arcs = [tuple(int(v) for v in a) for a in arcs]
        if any(len(a) != 4 for a in arcs):
            raise InputError("each arc must be (tail, head, c, d)")
        self.node_count = int(node_count)
        data = np.array(arcs, dtype=np.int64).reshape(-1, 4)
        self.tails, self.heads, self.lengths, self.increments = (data[:, i].copy() for i in range(4))
        for a in (self.tails, self.heads, self.lengths, self.increments):
            a.setflags(write=False)
        self._csr = None

    @property
    def arc_count(self) -> int:
        return self.tails.shape[0]

    def arcs(self) -> list[tuple[int, int, int, int]]:
        return [
            (int(a), int(b), int(c), int(d))
            for a, b, c, d in zip(self.tails, self.heads, self.lengths, self.increments)
        ]

    def csr(self):
        """``(indptr, adj_head, adj_arc)`` out-adjacency, arcs in id order per tail."""
        if self._csr is None:
            if self.arc_count and (
                self.tails.min() < 0
                or self.heads.min() < 0
                or max(self.tails.max(), self.heads.max()) >= self.node_count
            ):
                raise InputError("node id out of range")
            self._csr = _csr(self.node_count, self.tails, self.heads)
        return self._csr

    def undirected_neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in zip(self.tails.tolist(), self.heads.tolist()):
            if u != v:
                nbrs[u].append(v)
                nbrs[v].append(u)
        return nbrs

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.node_count == other.node_count and self.arcs() == other.arcs()

    def __repr__(self):
        return f"Network(node_count={self.node_count}, arcs={self.arc_count})"


@dataclass(frozen=True)
class ProblemInstance:
    network: Network
    source: int
    sink: int
    budget: int = 0

    def with_budget(self, budget: int) -> "ProblemInstance":
        return ProblemInstance(self.network, self.source, self.sink, int(budget))


def _check_arcs(inst: ProblemInstance, interdicted: Iterable[int]) -> np.ndarray:
    ids = np.fromiter((int(k) for k in interdicted), dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= inst.network.arc_count):
        raise InputError(f"invalid arc id in interdiction set {sorted(ids.tolist())}")
    return ids


def effective_lengths(inst: ProblemInstance, interdicted: Iterable[int] = ()) -> np.ndarray:
    net = inst.network
    ids = _check_arcs(inst, interdicted)
    w = net.lengths.copy()
    w[ids] += net.increments[ids]
    return w


def _shortest(inst: ProblemInstance, interdicted):
    indptr, adj_head, adj_arc = inst.network.csr()
    w = effective_lengths(inst, interdicted)
    return kernels.dijkstra(indptr, adj_head, adj_arc, w, inst.source)


def calc_length(inst: ProblemInstance, interdicted: Iterable[int] = ()):
    """Shortest s-t length after interdicting ``interdicted``, or ``UNREACHABLE``."""
    dist, _, _ = _shortest(inst, interdicted)
    d = int(dist[inst.sink])
    return UNREACHABLE if d >= kernels.INF else d


def calc_path(inst: ProblemInstance, interdicted: Iterable[int] = ()) -> frozenset[int]:
    """Node set of one shortest s-t path (smallest-id predecessor on ties)."""
    dist, pred, _ = _shortest(inst, interdicted)
    t = inst.sink
    if dist[t] >= kernels.INF:
        raise UnreachableError(f"sink {t} unreachable from source {inst.source}")
    nodes = {t}
    while t != inst.source:
        t = int(pred[t])
        nodes.add(t)
    return frozenset(nodes)


def pi_upper_bound(inst: ProblemInstance) -> int:
    """Upper bound |N| * max(c + d) on any post-interdiction label."""
    net = inst.network
    if net.arc_count == 0:
        return 0
    return net.node_count * int((net.lengths + net.increments).max())


def all_labels(inst: ProblemInstance, interdicted: Iterable[int] = ()) -> np.ndarray:
    """Distance from s to every node; unreachable nodes get ``pi_upper_bound``."""
    dist, _, _ = _shortest(inst, interdicted)
    return np.where(dist >= kernels.INF, pi_upper_bound(inst), dist)


def is_weakly_connected(net: Network, nodes: Iterable[int]) -> bool:
    members = set(int(v) for v in nodes)
    if not members:
        return False
    adj: dict[int, list[int]] = {v: [] for v in members}
    for u, v in zip(net.tails.tolist(), net.heads.tolist()):
        if u in members and v in members:
            adj[u].append(v)
            adj[v].append(u)
    start = next(iter(members))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(members)
