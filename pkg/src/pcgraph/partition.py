"""Index-based partitioning and the partition-node bipartite layout.

Vertices are split into ``k`` contiguous ranges of ``q = ceil(V / k)`` ids.
For every ordered pair of partitions ``(p, r)`` the layout lists the vertices
of ``p`` with at least one out-neighbor in ``r`` together with those
neighbors.  The same structure sizes the message bins and drives the
partition-centric scatter, whose id streams it replaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from .graph import Graph, VERTEX_DTYPE

DEFAULT_CACHE_BYTES = 256 * 1024


def choose_partition_count(num_vertices: int, state_bytes: int, cache_bytes: int, threads: int) -> int:
    """Smallest ``k`` that keeps a partition's state in cache and gives ``k >= 4t``."""
    if min(num_vertices, state_bytes, cache_bytes, threads) < 1:
        raise ValueError("all inputs must be >= 1")
    cache_bound = -(-num_vertices * state_bytes // cache_bytes)
    return max(cache_bound, 4 * threads)


@dataclass(frozen=True)
class PartitionLayout:
    num_vertices: int
    k: int
    q: int
    state_bytes: int = 8
    cache_bytes: int = DEFAULT_CACHE_BYTES

    @classmethod
    def with_partitions(cls, num_vertices: int, k: int, state_bytes: int = 8,
                        cache_bytes: int = DEFAULT_CACHE_BYTES) -> "PartitionLayout":
        if k < 1:
            raise ValueError("need at least one partition")
        q = max(1, -(-num_vertices // k))
        return cls(num_vertices, k, q, state_bytes, cache_bytes)

    @classmethod
    def auto(cls, num_vertices: int, state_bytes: int, threads: int,
             cache_bytes: int = DEFAULT_CACHE_BYTES) -> "PartitionLayout":
        n = max(num_vertices, 1)
        k = choose_partition_count(n, state_bytes, cache_bytes, threads)
        q = -(-n // k)
        if q * state_bytes > cache_bytes:
            # rounding q up can overflow the budget; shrink q and add partitions
            q = max(1, cache_bytes // state_bytes)
            k = -(-n // q)
        return cls(num_vertices, k, q, state_bytes, cache_bytes)

    def partition_of(self, v):
        return v // self.q

    def bounds(self, p: int) -> tuple:
        lo = min(p * self.q, self.num_vertices)
        return lo, min(lo + self.q, self.num_vertices)

    def size(self, p: int) -> int:
        lo, hi = self.bounds(p)
        return hi - lo


def partition_of(v, layout: PartitionLayout):
    return layout.partition_of(v)


class PNGCell(NamedTuple):
    sources: np.ndarray
    dest_counts: np.ndarray
    dests: np.ndarray
    local_dests: np.ndarray


@dataclass(frozen=True)
class PNGRow:
    """Layout for one source partition, cells ordered by destination partition.

    ``src[cell_src_ptr[r]:cell_src_ptr[r+1]]`` are the sources with neighbors in
    ``r`` and ``dst[cell_dst_ptr[r]:cell_dst_ptr[r+1]]`` their destinations,
    grouped by source.  ``rec_dst_start[i]`` is where record ``i``'s
    destinations begin.
    """

    cell_src_ptr: np.ndarray
    src: np.ndarray
    dest_count: np.ndarray
    rec_dst_start: np.ndarray
    cell_dst_ptr: np.ndarray
    dst: np.ndarray
    dst_local: np.ndarray
    weights: Optional[np.ndarray]

    @property
    def id_base(self) -> np.ndarray:
        # source-centric id streams hold a count header per record
        return self.cell_src_ptr + self.cell_dst_ptr


@dataclass(frozen=True)
class PNG:
    layout: PartitionLayout
    rows: List[PNGRow]
    pdeg: np.ndarray
    edges: np.ndarray
    sum_pdeg: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        """Average aggregation factor per partition (0 where it has no edges)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.edges > 0, self.sum_pdeg / np.maximum(self.edges, 1), 0.0)

    def cell(self, p: int, r: int) -> PNGCell:
        row = self.rows[p]
        s0, s1 = row.cell_src_ptr[r], row.cell_src_ptr[r + 1]
        d0, d1 = row.cell_dst_ptr[r], row.cell_dst_ptr[r + 1]
        return PNGCell(row.src[s0:s1], row.dest_count[s0:s1], row.dst[d0:d1], row.dst_local[d0:d1])


def _build_row(g: Graph, layout: PartitionLayout, p: int, pdeg: np.ndarray) -> PNGRow:
    k, q = layout.k, layout.q
    lo, hi = layout.bounds(p)
    e0, e1 = int(g.offsets[lo]), int(g.offsets[hi])
    dst = g.neighbors[e0:e1].astype(np.int64)
    src = np.repeat(np.arange(lo, hi, dtype=np.int64), np.diff(g.offsets[lo:hi + 1]))
    dpart = dst // q
    # edges are sorted by (src, dst), so a stable sort on dpart yields (dpart, src, dst)
    order = np.argsort(dpart, kind="stable")
    src, dst, dpart = src[order], dst[order], dpart[order]
    weights = None if g.weights is None else g.weights[e0:e1][order]

    new_rec = np.ones(len(dst), dtype=bool)
    if len(dst):
        new_rec[1:] = (src[1:] != src[:-1]) | (dpart[1:] != dpart[:-1])
    starts = np.flatnonzero(new_rec)
    rec_dst_start = np.append(starts, len(dst)).astype(np.int64)
    rec_src = src[starts]
    rec_part = dpart[starts]
    if len(rec_src):
        np.add.at(pdeg, rec_src, 1)

    cell_src_ptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(rec_part, minlength=k), out=cell_src_ptr[1:])
    cell_dst_ptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(dpart, minlength=k), out=cell_dst_ptr[1:])
    return PNGRow(cell_src_ptr, rec_src.astype(VERTEX_DTYPE), np.diff(rec_dst_start), rec_dst_start,
                  cell_dst_ptr, dst.astype(VERTEX_DTYPE), dst - dpart * q, weights)


def build_png(g: Graph, layout: PartitionLayout) -> PNG:
    if layout.num_vertices != g.num_vertices:
        raise ValueError("layout and graph disagree on vertex count")
    pdeg = np.zeros(g.num_vertices, dtype=np.int64)
    rows = [_build_row(g, layout, p, pdeg) for p in range(layout.k)]
    edges = np.array([len(r.dst) for r in rows], dtype=np.int64)
    sum_pdeg = np.array([len(r.src) for r in rows], dtype=np.int64)
    return PNG(layout, rows, pdeg, edges, sum_pdeg)


def bin_capacities(png: PNG) -> tuple:
    """Per-cell (value capacity, source-centric id capacity) as two k x k arrays."""
    k = png.layout.k
    values = np.zeros((k, k), dtype=np.int64)
    ids = np.zeros((k, k), dtype=np.int64)
    for p, row in enumerate(png.rows):
        values[p] = np.diff(row.cell_src_ptr)
        ids[p] = values[p] + np.diff(row.cell_dst_ptr)
    return values, ids
