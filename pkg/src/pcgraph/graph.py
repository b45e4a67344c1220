"""Graph ingestion, CSR construction, RMAT generation and weight assignment."""

from __future__ import annotations

import io
import math
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, EdgeListParseError

VERTEX_DTYPE = np.uint32
WEIGHT_DTYPE = np.int64

RMAT_DEFAULT_PROBS = (0.57, 0.19, 0.19, 0.05)
BINARY_MAGIC = b"GPOPCSR1"


@dataclass(frozen=True)
class EdgeList:
    num_vertices: int
    src: np.ndarray
    dst: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.src) != len(self.dst):
            raise ValueError("src and dst must have equal length")
        if self.weights is not None and len(self.weights) != len(self.src):
            raise ValueError("weights must be present on all edges or on none")
        if len(self.src) and max(int(self.src.max()), int(self.dst.max())) >= self.num_vertices:
            raise ValueError("edge endpoint out of range")

    @property
    def num_edges(self) -> int:
        return len(self.src)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def edges(self) -> list:
        """Edges as a list of tuples, mainly for tests and small graphs."""
        if self.weights is None:
            return list(zip(self.src.tolist(), self.dst.tolist()))
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weights.tolist()))

    @classmethod
    def from_pairs(cls, num_vertices: int, edges: Sequence[tuple]) -> "EdgeList":
        if not edges:
            empty = np.zeros(0, dtype=VERTEX_DTYPE)
            return cls(num_vertices, empty, empty.copy())
        arr = np.asarray(edges, dtype=np.int64)
        weights = arr[:, 2].astype(WEIGHT_DTYPE) if arr.shape[1] == 3 else None
        return cls(num_vertices, arr[:, 0].astype(VERTEX_DTYPE),
                   arr[:, 1].astype(VERTEX_DTYPE), weights)


@dataclass(frozen=True)
class Graph:
    """Immutable CSR adjacency over out-edges.

    ``neighbors[offsets[v]:offsets[v + 1]]`` are the out-neighbors of ``v``,
    sorted ascending.  ``weights`` is aligned with ``neighbors`` when present.
    """

    num_vertices: int
    offsets: np.ndarray
    neighbors: np.ndarray
    weights: Optional[np.ndarray] = None

    @property
    def num_edges(self) -> int:
        return len(self.neighbors)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.offsets)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def to_edge_list(self) -> EdgeList:
        src = np.repeat(np.arange(self.num_vertices, dtype=VERTEX_DTYPE), self.out_degree)
        return EdgeList(self.num_vertices, src, self.neighbors.copy(),
                        None if self.weights is None else self.weights.copy())

    def with_weights(self, weights: np.ndarray) -> "Graph":
        weights = np.asarray(weights, dtype=WEIGHT_DTYPE)
        if len(weights) != self.num_edges:
            raise ValueError("need one weight per edge")
        return Graph(self.num_vertices, self.offsets, self.neighbors, weights)


def _open_text(source) -> io.TextIOBase:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8")


def load_edge_list(source, weighted: Optional[bool] = None) -> EdgeList:
    """Parse a whitespace separated edge list.

    Lines are ``src dst`` or ``src dst w``; ``#`` and ``%`` start comments and
    a ``# vertices N`` comment fixes the vertex count.  With ``weighted=None``
    the weights are kept only if every edge carries one; ``True`` requires
    them and ``False`` ignores a third column.
    """
    fh = _open_text(source)
    declared = None
    src, dst, wts = [], [], []
    n_with_weight = 0
    try:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped[0] in "#%":
                toks = stripped[1:].split()
                if len(toks) == 2 and toks[0].lower() == "vertices":
                    try:
                        declared = int(toks[1])
                    except ValueError:
                        raise EdgeListParseError(lineno, f"bad vertex count {toks[1]!r}") from None
                continue
            toks = stripped.split()
            if len(toks) not in (2, 3):
                raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(toks)}")
            try:
                u, v = int(toks[0]), int(toks[1])
                w = int(toks[2]) if len(toks) == 3 else None
            except ValueError:
                raise EdgeListParseError(lineno, f"malformed token in {stripped!r}") from None
            if u < 0 or v < 0:
                raise EdgeListParseError(lineno, "negative vertex id")
            if weighted is True and w is None:
                raise EdgeListParseError(lineno, "missing weight")
            if w is not None:
                n_with_weight += 1
                if weighted is not False and w <= 0:
                    raise ValueError(f"line {lineno}: edge weight must be positive, got {w}")
            src.append(u)
            dst.append(v)
            wts.append(w)
    finally:
        if isinstance(source, (str, os.PathLike)):
            fh.close()

    if weighted is None:
        if 0 < n_with_weight < len(src):
            raise EdgeListParseError(0, "weights present on some edges but not all")
        keep_weights = n_with_weight > 0
    else:
        keep_weights = weighted

    max_id = max(max(src, default=-1), max(dst, default=-1))
    n = declared if declared is not None else max_id + 1
    if max_id >= n:
        raise EdgeListParseError(0, f"vertex id {max_id} exceeds declared count {n}")
    weights = np.asarray(wts, dtype=WEIGHT_DTYPE) if keep_weights else None
    return EdgeList(n, np.asarray(src, dtype=VERTEX_DTYPE), np.asarray(dst, dtype=VERTEX_DTYPE), weights)


def build_csr(el: EdgeList) -> Graph:
    n = el.num_vertices
    src = el.src.astype(np.int64)
    dst = el.dst.astype(np.int64)
    if el.weights is None:
        order = np.lexsort((dst, src))
        weights = None
    else:
        order = np.lexsort((el.weights, dst, src))
        weights = el.weights[order].astype(WEIGHT_DTYPE)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return Graph(n, offsets, dst[order].astype(VERTEX_DTYPE), weights)


def symmetrize(g: Graph) -> Graph:
    """Add the reverse of every edge (weights mirrored); parallel edges are kept."""
    el = g.to_edge_list()
    w = None if el.weights is None else np.concatenate([el.weights, el.weights])
    return build_csr(EdgeList(g.num_vertices, np.concatenate([el.src, el.dst]),
                              np.concatenate([el.dst, el.src]), w))


def generate_rmat(scale: int, avg_degree: int, probs=RMAT_DEFAULT_PROBS, seed: int = 0) -> EdgeList:
    """Recursive-matrix generator: each edge descends ``scale`` quadrant choices."""
    if scale < 1:
        raise ConfigError("rmat scale must be >= 1")
    a, b, c, d = (float(x) for x in probs)
    if min(a, b, c, d) < 0 or abs(a + b + c + d - 1.0) > 1e-9:
        raise ConfigError(f"rmat probabilities must be non-negative and sum to 1, got {probs}")
    n = 1 << scale
    m = avg_degree * n
    rng = np.random.default_rng(seed)
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    ab, abc = a + b, a + b + c
    for level in range(scale):
        r = rng.random(m)
        # quadrants: a=(0,0) b=(0,1) c=(1,0) d=(1,1)
        row = r >= ab
        col = ((r >= a) & (r < ab)) | (r >= abc)
        bit = 1 << (scale - 1 - level)
        src += row * bit
        dst += col * bit
    return EdgeList(n, src.astype(VERTEX_DTYPE), dst.astype(VERTEX_DTYPE))


def weight_range(num_vertices: int) -> int:
    return max(1, math.ceil(math.log2(num_vertices))) if num_vertices > 1 else 1


def assign_weights(g: Graph, seed: int = 0) -> Graph:
    """Uniform integer weights in ``[1, ceil(log2 V)]``, one per edge."""
    hi = weight_range(g.num_vertices)
    rng = np.random.default_rng(seed)
    return g.with_weights(rng.integers(1, hi + 1, size=g.num_edges, dtype=WEIGHT_DTYPE))


def save_binary(g: Graph, dest: Union[str, os.PathLike, BinaryIO]) -> None:
    """Write the binary CSR cache (little-endian, ``GPOPCSR1`` magic)."""
    own = isinstance(dest, (str, os.PathLike))
    fh = open(dest, "wb") if own else dest
    try:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<QQ", g.num_vertices, g.num_edges))
        fh.write(g.offsets.astype("<u8").tobytes())
        fh.write(g.neighbors.astype("<u4").tobytes())
        fh.write(b"\x01" if g.weighted else b"\x00")
        if g.weighted:
            fh.write(g.weights.astype("<u4").tobytes())
    finally:
        if own:
            fh.close()


def load_binary(source: Union[str, os.PathLike, BinaryIO]) -> Graph:
    own = isinstance(source, (str, os.PathLike))
    fh = open(source, "rb") if own else source
    try:
        data = fh.read()
    finally:
        if own:
            fh.close()
    if data[:8] != BINARY_MAGIC:
        raise ValueError("not a binary CSR file (bad magic)")
    n, m = struct.unpack_from("<QQ", data, 8)
    pos = 24
    offsets = np.frombuffer(data, dtype="<u8", count=n + 1, offset=pos).astype(np.int64)
    pos += 8 * (n + 1)
    neighbors = np.frombuffer(data, dtype="<u4", count=m, offset=pos).astype(VERTEX_DTYPE)
    pos += 4 * m
    if pos >= len(data):
        raise ValueError("truncated binary CSR file")
    weights = None
    if data[pos]:
        weights = np.frombuffer(data, dtype="<u4", count=m, offset=pos + 1).astype(WEIGHT_DTYPE)
    if offsets[0] != 0 or offsets[-1] != m or np.any(np.diff(offsets) < 0):
        raise ValueError("corrupt offsets in binary CSR file")
    return Graph(int(n), offsets, neighbors, weights)
