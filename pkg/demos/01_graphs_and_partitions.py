"""
Graphs, partitions and the bin layout
=====================================

Build a small graph, split it into cache-sized partitions and look at the
partition-node layout that sizes every message bin.
"""

import numpy as np

from pcgraph import (EdgeList, PartitionLayout, bin_capacities, build_csr, build_png,
                     choose_partition_count, generate_rmat)

# A star: vertex 0 points at 1..7.
g = build_csr(EdgeList.from_pairs(8, [(0, v) for v in range(1, 8)]))
print("offsets  ", g.offsets.tolist())
print("neighbors", g.neighbors.tolist())

# Four partitions of two vertices each.
layout = PartitionLayout.with_partitions(8, 4)
png = build_png(g, layout)
print("out-partition-degree of 0:", png.pdeg[0])
print("aggregation factor of partition 0:", png.ratio[0])

# Vertex 0 sends one message per destination partition, not one per edge.
for r in range(layout.k):
    cell = png.cell(0, r)
    print(f"  cell (0,{r}): sources {cell.sources.tolist()} -> {cell.dests.tolist()}")

values, ids = bin_capacities(png)
print("value slots per bin\n", values)
print("id slots per bin (count headers included)\n", ids)

###############################################################################
# Partition count for a real-sized graph
# --------------------------------------
# 8 bytes of state per vertex and a 256 KB budget: the cache bound wins for a
# million vertices, the thread bound wins for small graphs.

print(choose_partition_count(10 ** 6, 8, 262144, 4))
print(choose_partition_count(1000, 8, 262144, 4))

big = build_csr(generate_rmat(14, 16, seed=1))
lay = PartitionLayout.auto(big.num_vertices, state_bytes=18, threads=4)
big_png = build_png(big, lay)
print(f"rmat scale 14: V={big.num_vertices} E={big.num_edges} k={lay.k} q={lay.q}")
print("aggregation factor per partition:", np.round(big_png.ratio, 3))
