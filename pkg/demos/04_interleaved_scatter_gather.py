"""
Interleaved scatter-gather on a long chain
==========================================

With min-style programs a partition may absorb messages already published to
it before it scatters.  Updates then travel through several partitions in one
iteration.
"""

import numpy as np

from pcgraph import EdgeList, Engine, EngineConfig, build_csr, make_sssp

n = 64
g = build_csr(EdgeList.from_pairs(n, [(i, i + 1) for i in range(n - 1)])).with_weights(np.ones(n - 1))

for isg in (False, True):
    with Engine(g, make_sssp(g, 0), EngineConfig(partitions=8, isg=isg)) as eng:
        stats = eng.run_until().stats
        dist = eng.program.distance
    pre = sum(s.isg_records for s in stats)
    print(f"isg={isg!s:5}  iterations={len(stats)}  records absorbed early={pre}  "
          f"distance[63]={dist[63]}")

###############################################################################
# Which iterations benefit
# ------------------------
# An early gather only happens when a message crosses into a partition that has
# not scattered yet in the current iteration.

with Engine(g, make_sssp(g, 0), EngineConfig(partitions=8, isg=True)) as eng:
    for s in eng.run_until().stats[:12]:
        print(f"  iter {s.iteration:2d}: frontier {s.frontier_before}  early records {s.isg_records}")
