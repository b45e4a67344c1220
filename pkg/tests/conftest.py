import numpy as np
import pytest

from pcgraph import EdgeList, assign_weights, build_csr


def graph_from(n, edges):
    return build_csr(EdgeList.from_pairs(n, edges))


def _grid(side):
    edges = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            if c + 1 < side:
                edges.append((v, v + 1))
            if r + 1 < side:
                edges.append((v, v + side))
    return side * side, edges


HAND_GRAPHS = {
    "chain4": (4, [(0, 1), (1, 2), (2, 3)]),
    "two_cycle": (2, [(0, 1), (1, 0)]),
    "star8": (8, [(0, v) for v in range(1, 8)]),
    "in_star8": (8, [(v, 0) for v in range(1, 8)]),
    "disjoint_edges": (4, [(0, 1), (2, 3)]),
    "complete5": (5, [(u, v) for u in range(5) for v in range(5) if u != v]),
    "binary_tree15": (15, [(i, c) for i in range(7) for c in (2 * i + 1, 2 * i + 2)]),
    "grid16": _grid(4),
    "loops_and_dups": (5, [(0, 0), (0, 1), (0, 1), (1, 2), (2, 0), (2, 4)]),
    "mixed12": (12, [(0, 1), (1, 2), (2, 0), (3, 4), (5, 6), (6, 7), (7, 5), (9, 3), (11, 10)]),
}


@pytest.fixture(params=sorted(HAND_GRAPHS))
def hand_graph(request):
    n, edges = HAND_GRAPHS[request.param]
    return graph_from(n, edges)


def weighted(g, seed=5):
    if g.num_vertices < 2:
        return g.with_weights(np.ones(g.num_edges, dtype=np.int64))
    return assign_weights(g, seed)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
