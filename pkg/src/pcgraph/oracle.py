"""Serial reference implementations.

Nothing here imports the partition, bins or engine modules; the only shared
input is the canonical CSR graph.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

INF = np.iinfo(np.int64).max


@dataclass
class OracleResult:
    algorithm: str
    values: np.ndarray
    meta: dict = field(default_factory=dict)


def _adjacency(g: Graph):
    offs = g.offsets.tolist()
    nbrs = g.neighbors.tolist()
    return offs, nbrs


def oracle_bfs(g: Graph, root: int) -> OracleResult:
    """Queue BFS; level per vertex, -1 if unreachable."""
    offs, nbrs = _adjacency(g)
    level = [-1] * g.num_vertices
    level[root] = 0
    todo = deque([root])
    while todo:
        u = todo.popleft()
        for j in range(offs[u], offs[u + 1]):
            v = nbrs[j]
            if level[v] < 0:
                level[v] = level[u] + 1
                todo.append(v)
    return OracleResult("bfs", np.array(level, dtype=np.int64))


def check_bfs_parents(g: Graph, root: int, parent: np.ndarray, level: np.ndarray) -> list:
    """Problems found in a parent array, checked against oracle levels."""
    n = g.num_vertices
    parent = np.asarray(parent, dtype=np.int64)
    level = np.asarray(level, dtype=np.int64)
    problems = []
    bad = np.flatnonzero((parent >= 0) != (level >= 0))
    problems += [f"vertex {v}: parent {parent[v]} but level {level[v]}" for v in bad[:20].tolist()]
    if parent[root] != root:
        problems.append(f"root {root} has parent {parent[root]}")
    v = np.flatnonzero((parent >= 0) & (level >= 0))
    v = v[v != root]
    pv = parent[v]
    if len(pv) and (pv.max() >= n):
        return problems + ["parent id out of range"]
    wrong_level = v[level[pv] != level[v] - 1]
    problems += [f"vertex {x}: parent {parent[x]} not one level up" for x in wrong_level[:20].tolist()]
    # CSR rows are sorted, so (src, dst) keys are globally sorted
    keys = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.offsets)) * n + g.neighbors.astype(np.int64)
    want = pv * n + v
    pos = np.minimum(np.searchsorted(keys, want), max(len(keys) - 1, 0))
    missing = v[(keys[pos] != want)] if len(keys) else v
    problems += [f"vertex {x}: no edge from parent {parent[x]}" for x in missing[:20].tolist()]
    return problems


def oracle_dijkstra(g: Graph, root: int) -> OracleResult:
    if g.weights is None:
        raise ValueError("dijkstra needs edge weights")
    offs, nbrs = _adjacency(g)
    wts = g.weights.tolist()
    dist = [INF] * g.num_vertices
    dist[root] = 0
    heap = [(0, root)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for j in range(offs[u], offs[u + 1]):
            v, nd = nbrs[j], d + wts[j]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return OracleResult("sssp", np.array(dist, dtype=np.int64))


def oracle_cc(g: Graph) -> OracleResult:
    """Union-find labels: the smallest vertex id of each weak component."""
    parent = list(range(g.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    offs, nbrs = _adjacency(g)
    for u in range(g.num_vertices):
        for j in range(offs[u], offs[u + 1]):
            a, b = find(u), find(nbrs[j])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return OracleResult("cc", np.array([find(v) for v in range(g.num_vertices)], dtype=np.int64))


def oracle_pagerank(g: Graph, damping: float = 0.85, iters: int = 10) -> OracleResult:
    """Synchronous power iteration; dangling vertices leak their mass."""
    n = g.num_vertices
    src = np.repeat(np.arange(n), np.diff(g.offsets))
    dst = g.neighbors.astype(np.int64)
    deg = np.diff(g.offsets).astype(float)
    score = np.full(n, 1.0 / n)
    for _ in range(iters):
        incoming = np.zeros(n)
        contrib = score[src] / deg[src]
        for e in range(len(dst)):
            incoming[dst[e]] += contrib[e]
        score = (1.0 - damping) / n + damping * incoming
    return OracleResult("pagerank", score, {"mass": float(score.sum())})


def oracle_nibble(g: Graph, seed: int, epsilon: float = 1e-9, max_iter: int = 500) -> OracleResult:
    """Frontier-synchronous simulation of the seeded walk with threshold continuity.

    ``meta["frontiers"]`` lists the sorted active set at the start of every
    iteration.
    """
    offs, nbrs = _adjacency(g)
    deg = [offs[v + 1] - offs[v] for v in range(g.num_vertices)]
    prob = [0.0] * g.num_vertices
    prob[seed] = 1.0
    active = {seed}
    frontiers = []
    it = 0
    while active and it < max_iter:
        frontiers.append(sorted(active))
        outbox = []
        for v in sorted(active):
            if deg[v]:
                share = prob[v] / (2 * deg[v])
                outbox.extend((nbrs[j], share) for j in range(offs[v], offs[v + 1]))
        nxt = set()
        for v in sorted(active):
            prob[v] = prob[v] / 2
            if prob[v] >= epsilon * deg[v]:
                nxt.add(v)
        for v, share in outbox:
            prob[v] += share
            nxt.add(v)
        active = {v for v in nxt if prob[v] >= epsilon * deg[v]}
        it += 1
    return OracleResult("nibble", np.array(prob), {"iterations": it, "frontiers": frontiers,
                                                   "final_frontier": sorted(active)})


def oracle_message_count(g: Graph, vertices_per_partition: int, frontier) -> tuple:
    """(aggregated messages, destination ids) a source-centric scatter of ``frontier`` emits."""
    msgs = ids = 0
    for v in frontier:
        v = int(v)
        dsts = g.neighbors[g.offsets[v]:g.offsets[v + 1]].tolist()
        msgs += len({d // vertices_per_partition for d in dsts})
        ids += len(dsts)
    return msgs, ids


def max_relative_error(got, want) -> float:
    """Largest ``|got - want| / |want|``; where ``want`` is 0, ``got`` must be 0 too."""
    got, want = np.asarray(got, float), np.asarray(want, float)
    zero = want == 0
    if np.any(got[zero] != 0):
        return float("inf")
    if zero.all():
        return 0.0
    return float(np.max(np.abs(got[~zero] - want[~zero]) / np.abs(want[~zero])))
