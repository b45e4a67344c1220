"""
Choosing a scatter mode per partition
=====================================

A BFS frontier starts tiny, swells, then shrinks.  Source-centric scatter
touches only active vertices; partition-centric scatter streams whole bins
with a fixed layout.  The volume model picks one per partition per iteration.
"""

from pcgraph import Engine, EngineConfig, build_csr, generate_rmat, make_bfs
from pcgraph.model import ModeInputs, pc_volume, sc_volume, select_mode

m = ModeInputs(active_vertices=250, active_edges=1000, edges=1000, ratio=0.3, sum_pdeg=300, k=16)
print("dense frontier:  pc", pc_volume(m), " 2*sc", 2 * sc_volume(m), "->", "PC" if select_mode(m) else "SC")
m = ModeInputs(active_vertices=5, active_edges=10, edges=1000, ratio=0.3, sum_pdeg=300, k=16)
print("sparse frontier: pc", pc_volume(m), " 2*sc", 2 * sc_volume(m), "->", "PC" if select_mode(m) else "SC")

g = build_csr(generate_rmat(14, 16, seed=1))

###############################################################################
# Same traversal in all three configurations
# ------------------------------------------
# Costs are modelled bytes, with partition-centric volume divided by the
# bandwidth ratio so both modes are in comparable time units.

for mode in ("sc", "pc", "dc"):
    with Engine(g, make_bfs(g, 0), EngineConfig(mode=mode)) as eng:
        stats = eng.run_until().stats
    print(f"\nmode={mode}")
    for s in stats:
        print(f"  iter {s.iteration}: frontier {s.frontier_before:6d}  sc parts {s.sc_partitions:2d}  "
              f"pc parts {s.pc_partitions:2d}  msgs {s.messages_written:7d}  cost {s.chosen_cost:10.0f}")
    print("  total modelled cost", round(sum(s.chosen_cost for s in stats)))
