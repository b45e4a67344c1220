"""
Five vertex programs checked against serial references
======================================================

PageRank, BFS, SSSP, connected components and Nibble on one generated graph,
each compared with an independent serial implementation.
"""

import numpy as np

from pcgraph import (EngineConfig, assign_weights, build_csr, generate_rmat, make_bfs, make_cc,
                     make_nibble, make_pagerank, make_sssp, run, symmetrize)
from pcgraph import oracle

g = build_csr(generate_rmat(12, 16, seed=3))
cfg = EngineConfig(threads=4)

pr = run(g, make_pagerank(g, 0.85, 10), cfg)
err = oracle.max_relative_error(pr.values, oracle.oracle_pagerank(g, 0.85, 10).values)
print(f"pagerank: {pr.iterations} iterations, max relative error {err:.1e}")
print("  top vertices:", np.argsort(pr.values)[::-1][:5].tolist())

bfs = run(g, make_bfs(g, 0), cfg)
levels = oracle.oracle_bfs(g, 0).values
print(f"bfs: reached {np.count_nonzero(bfs.values >= 0)} vertices in {bfs.iterations} iterations,",
      "tree problems:", len(oracle.check_bfs_parents(g, 0, bfs.values, levels)))

# Integer weights in [1, log2 V].
gw = assign_weights(g, seed=1)
sp = run(gw, make_sssp(gw, 0), EngineConfig(threads=4, isg=True))
print("sssp: equal to dijkstra:", np.array_equal(sp.values, oracle.oracle_dijkstra(gw, 0).values))

# Label propagation needs both edge directions.
gs = symmetrize(g)
cc = run(gs, make_cc(gs), cfg)
print(f"cc: {len(np.unique(cc.values))} components,",
      "equal to union-find:", np.array_equal(cc.values, oracle.oracle_cc(gs).values))

nb = run(g, make_nibble(g, 0, epsilon=1e-6), cfg)
want = oracle.oracle_nibble(g, 0, epsilon=1e-6).values
print(f"nibble: mass {nb.values.sum():.6f}, support {np.count_nonzero(nb.values)},",
      f"max relative error {oracle.max_relative_error(nb.values, want):.1e}")
