"""Partition-centric scatter/gather graph processing."""

from .errors import BinCorruptionError, ConfigError, EdgeListParseError
from .graph import (EdgeList, Graph, assign_weights, build_csr, generate_rmat, load_binary,
                    load_edge_list, save_binary, symmetrize)
from .partition import (PNG, PartitionLayout, bin_capacities, build_png, choose_partition_count,
                        partition_of)
from .model import PC, SC, ModeInputs, pc_volume, sc_volume, select_mode
from .programs import (BFS, SSSP, ConnectedComponents, Nibble, PageRank, ScalarProgram,
                       VertexProgram, make_bfs, make_cc, make_nibble, make_pagerank, make_sssp)
from .engine import Engine, EngineConfig, IterationStats, RunResult, run

__version__ = "0.1.0"
