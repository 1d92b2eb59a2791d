"""Randomized connected partitioning by region growing.

Blocks are grown breadth-first from a seed node until they reach ``n``
nodes. Seeds are taken from the unassigned nodes with the fewest unassigned
neighbours (ties broken by a random rank), which peels the graph from its
boundary and keeps leftovers rare. Leftover blocks smaller than
``ceil(n/2)`` are merged into a random adjacent block; merged blocks larger
than ``2n`` are split when a connected split within bounds can be found.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .graph import Network


@dataclass(frozen=True)
class Partitioning:
    node_count: int
    blocks: tuple[frozenset[int], ...]
    _owner: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_blocks(cls, node_count: int, blocks) -> "Partitioning":
        blocks = tuple(frozenset(int(v) for v in b) for b in blocks)
        owner = np.full(node_count, -1, dtype=np.int64)
        for i, b in enumerate(blocks):
            for v in b:
                if owner[v] != -1:
                    raise InputError(f"node {v} appears in blocks {owner[v]} and {i}")
                owner[v] = i
        owner.setflags(write=False)
        return cls(node_count, blocks, owner)

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        """Order-independent form, for comparing partitionings."""
        return tuple(sorted(tuple(sorted(b)) for b in self.blocks))


def find_block(p: Partitioning, v: int) -> int:
    """Index of the block that contains node ``v``."""
    if not 0 <= v < p.node_count:
        raise InputError(f"node {v} out of range [0, {p.node_count})")
    i = int(p._owner[v])
    if i < 0:
        raise RuntimeError(f"partitioning is malformed: node {v} is unassigned")
    return i


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _grow(start, size, nbrs, allowed, rank):
    block = [start]
    seen = {start}
    queue = deque([start])
    while queue and len(block) < size:
        u = queue.popleft()
        for v in sorted((w for w in nbrs[u] if w in allowed and w not in seen), key=rank.__getitem__):
            seen.add(v)
            block.append(v)
            queue.append(v)
            if len(block) == size:
                break
    return block


def _connected(nodes, nbrs) -> bool:
    nodes = set(nodes)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if v in nodes and v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(nodes)


def _split(block, n, lo, nbrs, rng):
    """Try to cut ``block`` into two connected parts with sizes >= lo."""
    members = set(block)
    order = rng.permutation(sorted(members)).tolist()
    rank = {v: i for i, v in enumerate(order)}
    for start in order:
        part = _grow(start, n, nbrs, members, rank)
        rest = members.difference(part)
        if len(part) >= lo and len(rest) >= lo and _connected(rest, nbrs):
            return [part, sorted(rest)]
    return [block]


def partition(net: Network, n: int, rng) -> Partitioning:
    """Cover ``net``'s nodes with weakly connected blocks of about ``n`` nodes.

    ``rng`` is a ``numpy.random.Generator`` (advanced in place) or a seed.
    """
    if n < 1:
        raise InputError(f"block size must be >= 1, got {n}")
    rng = _as_rng(rng)
    N = net.node_count
    nbrs = [sorted(set(x)) for x in net.undirected_neighbors()]
    perm = rng.permutation(N).tolist()
    rank = [0] * N
    for i, v in enumerate(perm):
        rank[v] = i

    unassigned = set(range(N))
    free_deg = [len(x) for x in nbrs]
    blocks: list[list[int]] = []
    while unassigned:
        start = min(unassigned, key=lambda v: (free_deg[v], rank[v]))
        block = _grow(start, n, nbrs, unassigned, rank)
        for v in block:
            unassigned.discard(v)
        for v in block:
            for w in nbrs[v]:
                free_deg[w] -= 1
        blocks.append(block)

    lo, hi = math.ceil(n / 2), 2 * n
    owner = [0] * N
    for i, b in enumerate(blocks):
        for v in b:
            owner[v] = i
    alive = [True] * len(blocks)
    for i in sorted(range(len(blocks)), key=lambda i: len(blocks[i])):
        b = blocks[i]
        if not alive[i] or len(b) >= lo:
            continue
        adjacent = sorted({owner[w] for v in b for w in nbrs[v]} - {i})
        if not adjacent:
            continue
        fitting = [j for j in adjacent if len(blocks[j]) + len(b) <= hi]
        pool = fitting or adjacent
        j = pool[int(rng.integers(len(pool)))]
        blocks[j] = blocks[j] + b
        for v in b:
            owner[v] = j
        blocks[i] = []
        alive[i] = False

    out = []
    for i, b in enumerate(blocks):
        if not alive[i]:
            continue
        out.extend(_split(b, n, lo, nbrs, rng) if len(b) > hi else [b])
    return Partitioning.from_blocks(N, out)
