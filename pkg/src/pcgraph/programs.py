"""Vertex programs: the callback contract and the five bundled applications.

Callbacks are vectorized.  The engine always hands a program a batch of
vertex ids that belong to a single partition it owns, so a callback may
read and write the state of exactly those vertices and nothing else.

``gather(values, vids)`` must behave as if the messages were applied one at
a time in array order, and returns the ids that should become active
(duplicates allowed).

In partition-centric scatters every source with an edge into the target
partition emits a value, active or not.  Programs whose state would be
corrupted by stale messages set ``null_value``; the engine writes it for
inactive sources and drops such messages before ``gather``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import ConfigError
from .graph import Graph

FRONTIER_BYTES = 2  # current and next frontier bitmaps


class VertexProgram:
    value_dtype = np.float64
    null_value = None
    idempotent_gather = False
    weighted = False
    all_active = False
    max_iterations: Optional[int] = None
    name = "program"

    def __init__(self, graph: Graph):
        self.graph = graph
        self.deg = graph.out_degree

    @property
    def value_bytes(self) -> int:
        return np.dtype(self.value_dtype).itemsize

    @property
    def state_bytes_per_vertex(self) -> int:
        return self.value_bytes + FRONTIER_BYTES

    def load_frontier(self) -> np.ndarray:
        """Reset state and return the initially active vertex ids."""
        raise NotImplementedError

    def scatter_value(self, vids: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def init(self, vids: np.ndarray) -> np.ndarray:
        return np.zeros(len(vids), dtype=bool)

    def gather(self, values: np.ndarray, vids: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def filter(self, vids: np.ndarray) -> np.ndarray:
        return np.ones(len(vids), dtype=bool)

    def apply_weight(self, values: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return values

    def result(self) -> np.ndarray:
        raise NotImplementedError


class ScalarProgram(VertexProgram):
    """Adapter for programs written one vertex at a time.

    Subclasses implement ``scatter_one``, ``init_one``, ``gather_one``,
    ``filter_one`` and optionally ``apply_weight_one``.  Convenient, but every
    message costs a Python call.
    """

    def scatter_one(self, v: int):
        raise NotImplementedError

    def init_one(self, v: int) -> bool:
        return False

    def gather_one(self, value, v: int) -> bool:
        raise NotImplementedError

    def filter_one(self, v: int) -> bool:
        return True

    def apply_weight_one(self, value, weight):
        return value

    def scatter_value(self, vids):
        return np.array([self.scatter_one(int(v)) for v in vids], dtype=self.value_dtype)

    def init(self, vids):
        return np.array([self.init_one(int(v)) for v in vids], dtype=bool)

    def gather(self, values, vids):
        hits = [int(v) for val, v in zip(values.tolist(), vids.tolist()) if self.gather_one(val, v)]
        return np.asarray(hits, dtype=np.int64)

    def filter(self, vids):
        return np.array([self.filter_one(int(v)) for v in vids], dtype=bool)

    def apply_weight(self, values, weights):
        out = [self.apply_weight_one(a, w) for a, w in zip(values.tolist(), weights.tolist())]
        return np.asarray(out, dtype=self.value_dtype)


def _check_vertex(graph: Graph, v: int, what: str) -> int:
    if not 0 <= v < graph.num_vertices:
        raise ConfigError(f"{what} {v} out of range for {graph.num_vertices} vertices")
    return int(v)


class PageRank(VertexProgram):
    """Topological PageRank; zero out-degree vertices emit nothing."""

    all_active = True
    name = "pagerank"

    def __init__(self, graph: Graph, damping: float = 0.85, iterations: int = 10):
        super().__init__(graph)
        if not 0.0 < damping < 1.0:
            raise ConfigError("damping must lie in (0, 1)")
        self.damping = damping
        self.max_iterations = iterations
        self.inv_deg = np.divide(1.0, self.deg, out=np.zeros(graph.num_vertices), where=self.deg > 0)
        self.score = np.empty(graph.num_vertices)

    @property
    def state_bytes_per_vertex(self):
        return 16 + FRONTIER_BYTES

    def load_frontier(self):
        self.score[:] = 1.0 / self.graph.num_vertices
        return np.arange(self.graph.num_vertices, dtype=np.int64)

    def scatter_value(self, vids):
        return self.score[vids] * self.inv_deg[vids]

    def init(self, vids):
        self.score[vids] = 0.0
        return np.ones(len(vids), dtype=bool)

    def gather(self, values, vids):
        np.add.at(self.score, vids, values)
        return vids

    def filter(self, vids):
        n = self.graph.num_vertices
        self.score[vids] = (1.0 - self.damping) / n + self.damping * self.score[vids]
        return np.ones(len(vids), dtype=bool)

    def result(self):
        return self.score


class BFS(VertexProgram):
    """Parent pointers of a BFS tree; unreached vertices keep -1."""

    value_dtype = np.int32
    null_value = -1
    name = "bfs"

    def __init__(self, graph: Graph, root: int):
        super().__init__(graph)
        self.root = _check_vertex(graph, root, "root")
        self.parent = np.full(graph.num_vertices, -1, dtype=np.int32)

    def load_frontier(self):
        self.parent[:] = -1
        self.parent[self.root] = self.root
        return np.array([self.root], dtype=np.int64)

    def scatter_value(self, vids):
        return vids.astype(np.int32)

    def gather(self, values, vids):
        fresh = self.parent[vids] < 0
        cand, vals = vids[fresh], values[fresh]
        # first message in processing order wins
        won, first = np.unique(cand, return_index=True)
        self.parent[won] = vals[first]
        return won

    def result(self):
        return self.parent


class _MinLabel(VertexProgram):
    idempotent_gather = True

    def _min_update(self, state, values, vids):
        before = state[vids]
        np.minimum.at(state, vids, values)
        return vids[state[vids] < before]


class SSSP(_MinLabel):
    """Bellman-Ford distances with integer weights."""

    INF = np.iinfo(np.int64).max
    value_dtype = np.int64
    null_value = INF
    weighted = True
    name = "sssp"

    def __init__(self, graph: Graph, root: int):
        if not graph.weighted:
            raise ConfigError("sssp requires a weighted graph")
        super().__init__(graph)
        self.root = _check_vertex(graph, root, "root")
        self.distance = np.full(graph.num_vertices, self.INF, dtype=np.int64)

    def load_frontier(self):
        self.distance[:] = self.INF
        self.distance[self.root] = 0
        return np.array([self.root], dtype=np.int64)

    def scatter_value(self, vids):
        return self.distance[vids]

    def apply_weight(self, values, weights):
        return np.where(values == self.INF, self.INF, values + weights)

    def gather(self, values, vids):
        return self._min_update(self.distance, values, vids)

    def result(self):
        return self.distance


class ConnectedComponents(_MinLabel):
    """Min-label propagation; run it on a symmetrized graph."""

    value_dtype = np.int32
    null_value = -1
    name = "cc"

    def __init__(self, graph: Graph):
        super().__init__(graph)
        self.label = np.arange(graph.num_vertices, dtype=np.int32)

    def load_frontier(self):
        self.label[:] = np.arange(self.graph.num_vertices, dtype=np.int32)
        return np.arange(self.graph.num_vertices, dtype=np.int64)

    def scatter_value(self, vids):
        return self.label[vids]

    def gather(self, values, vids):
        return self._min_update(self.label, values, vids)

    def result(self):
        return self.label


class Nibble(VertexProgram):
    """Seeded random-walk probabilities with a degree-scaled activity threshold.

    Half of an active vertex's mass stays put, half is spread evenly over its
    out-edges.  The probability array is reset lazily: only entries touched by
    the previous run are cleared, so repeated runs cost what they explore.
    """

    null_value = -1.0
    name = "nibble"

    def __init__(self, graph: Graph, seed: int, epsilon: float = 1e-9, max_iter: int = 500):
        super().__init__(graph)
        self.seed = _check_vertex(graph, seed, "seed")
        self.epsilon = epsilon
        self.max_iterations = max_iter
        self.prob = np.zeros(graph.num_vertices)
        self.threshold = epsilon * self.deg
        self._touched = []

    @property
    def state_bytes_per_vertex(self):
        return 16 + FRONTIER_BYTES

    def load_frontier(self, seed: Optional[int] = None):
        if seed is not None:
            self.seed = _check_vertex(self.graph, seed, "seed")
        for chunk in self._touched:
            self.prob[chunk] = 0.0
        self._touched = [np.array([self.seed], dtype=np.int64)]
        self.prob[self.seed] = 1.0
        return np.array([self.seed], dtype=np.int64)

    def touched(self) -> np.ndarray:
        return np.unique(np.concatenate(self._touched))

    def scatter_value(self, vids):
        return self.prob[vids] / (2.0 * self.deg[vids])

    def init(self, vids):
        self.prob[vids] *= 0.5
        return self.prob[vids] >= self.threshold[vids]

    def gather(self, values, vids):
        np.add.at(self.prob, vids, values)
        self._touched.append(vids)
        return vids

    def filter(self, vids):
        return self.prob[vids] >= self.threshold[vids]

    def result(self):
        return self.prob


def make_pagerank(graph: Graph, damping: float = 0.85, iters: int = 10) -> PageRank:
    return PageRank(graph, damping, iters)


def make_bfs(graph: Graph, root: int) -> BFS:
    return BFS(graph, root)


def make_sssp(graph: Graph, root: int) -> SSSP:
    return SSSP(graph, root)


def make_cc(graph: Graph) -> ConnectedComponents:
    return ConnectedComponents(graph)


def make_nibble(graph: Graph, seed_vertex: int, epsilon: float = 1e-9, max_iter: int = 500) -> Nibble:
    return Nibble(graph, seed_vertex, epsilon, max_iter)
