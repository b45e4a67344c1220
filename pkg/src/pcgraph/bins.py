"""Message bins: one value stream and one id stream per partition pair.

Each source partition owns a row of bins laid out contiguously in two flat
buffers whose per-cell extents come from the PNG, so bins never grow.  In a
source-centric scatter the id stream for a cell holds records of the form
``[count, local_id_0 .. local_id_{count-1}]``; a partition-centric scatter
writes only values and the reader walks the static PNG destination lists.

Publication: a writer fills its cells, then stores the record counts in
``published``.  Readers use ``[consumed, published)`` and advance
``consumed``.  Row ``p`` of ``published`` and ``mode_tag[p]`` are written only
by the owner of partition ``p``; column ``q`` of ``consumed`` only by the
owner of ``q``.
"""

from __future__ import annotations

import numba
import numpy as np

from .errors import BinCorruptionError
from .model import PC, SC
from .partition import PNG

_EMPTY_W = np.zeros(0, dtype=np.int64)


@numba.njit(nogil=True, cache=True)
def sc_scatter_kernel(active, vals, offsets, neighbors, weights, has_w, q,
                      data, data_base, ids, id_base, wts, rec_fill, id_fill, rec_part):
    """Write one record per (active vertex, neighboring partition).

    Vertices are taken in the given order and each vertex's records go out in
    ascending partition order, each at the insertion point of its bin.
    Returns the number of records written; ``rec_part`` receives the
    destination partition of each record in write order.
    """
    nrec = 0
    for i in range(active.shape[0]):
        v = active[i]
        j = offsets[v]
        e = offsets[v + 1]
        while j < e:
            part = np.int64(neighbors[j]) // q
            t = j + 1
            while t < e and np.int64(neighbors[t]) // q == part:
                t += 1
            data[data_base[part] + rec_fill[part]] = vals[i]
            rec_fill[part] += 1
            pos = id_base[part] + id_fill[part]
            ids[pos] = t - j
            lo = part * q
            for m in range(j, t):
                pos += 1
                ids[pos] = np.int64(neighbors[m]) - lo
                if has_w:
                    wts[pos] = weights[m]
            id_fill[part] += t - j + 1
            rec_part[nrec] = part
            nrec += 1
            j = t
    return nrec


@numba.njit(nogil=True, cache=True)
def sc_decode_kernel(ids, wts, has_w, data, id_start, id_end, rec_start, rec_end,
                     out_vals, out_dst, out_w):
    """Expand framed records into per-edge (value, local dst, weight).

    Returns the number of edges produced, or -1 if the framing is broken.
    """
    pos = id_start
    r = rec_start
    n = 0
    while pos < id_end:
        c = ids[pos]
        if c <= 0 or pos + c >= id_end:
            return -1
        if r >= rec_end or n + c > out_vals.shape[0]:
            return -1
        val = data[r]
        for m in range(c):
            out_vals[n] = val
            out_dst[n] = ids[pos + 1 + m]
            if has_w:
                out_w[n] = wts[pos + 1 + m]
            n += 1
        pos += c + 1
        r += 1
    if r != rec_end or pos != id_end:
        return -1
    return n


class BinMatrix:
    """k x k bins for a fixed PNG and message value type."""

    def __init__(self, png: PNG, value_dtype, weighted: bool, record_writes: bool = False):
        self.png = png
        k = png.layout.k
        self.k = k
        self.value_dtype = np.dtype(value_dtype)
        self.weighted = weighted
        self.data = [np.empty(len(r.src), dtype=self.value_dtype) for r in png.rows]
        self.ids = [np.empty(len(r.src) + len(r.dst), dtype=np.int64) for r in png.rows]
        self.wts = [np.empty(len(r.src) + len(r.dst), dtype=np.int64) if weighted else _EMPTY_W
                    for r in png.rows]
        self.id_base = [r.id_base for r in png.rows]
        self.published = np.zeros((k, k), dtype=np.int64)
        self.id_published = np.zeros((k, k), dtype=np.int64)
        self.consumed = np.zeros((k, k), dtype=np.int64)
        self.id_consumed = np.zeros((k, k), dtype=np.int64)
        self.mode_tag = np.full(k, -1, dtype=np.int8)
        self.write_log = [] if record_writes else None

    def pending(self, p: int, q: int) -> int:
        return int(self.published[p, q] - self.consumed[p, q])

    def clear_cell(self, p: int, q: int) -> None:
        self.published[p, q] = self.consumed[p, q] = 0
        self.id_published[p, q] = self.id_consumed[p, q] = 0

    def read(self, p: int, q: int):
        """Consume the published prefix of ``bin[p][q]``.

        Returns ``(values, local_dst, weights_or_None, records)``, one entry
        per edge.  The caller must own destination partition ``q``.
        """
        pub = int(self.published[p, q])
        con = int(self.consumed[p, q])
        row = self.png.rows[p]
        base = int(row.cell_src_ptr[q])
        cap = int(row.cell_src_ptr[q + 1]) - base
        tag = self.mode_tag[p]
        if pub > cap:
            raise BinCorruptionError(f"bin[{p}][{q}] published {pub} records, capacity {cap}")
        if tag == SC:
            id_pub = int(self.id_published[p, q])
            id_con = int(self.id_consumed[p, q])
            n = (id_pub - id_con) - (pub - con)
            if n < 0:
                raise BinCorruptionError(f"bin[{p}][{q}] id stream shorter than its records")
            vals = np.empty(n, dtype=self.value_dtype)
            dst = np.empty(n, dtype=np.int64)
            w = np.empty(n if self.weighted else 0, dtype=np.int64)
            id0 = int(self.id_base[p][q])
            got = sc_decode_kernel(self.ids[p], self.wts[p], self.weighted, self.data[p],
                                   id0 + id_con, id0 + id_pub, base + con, base + pub, vals, dst, w)
            if got != n:
                raise BinCorruptionError(f"bin[{p}][{q}] id stream framing does not match source-centric tag")
            self.id_consumed[p, q] = id_pub
        elif tag == PC:
            if self.id_published[p, q] != 0:
                raise BinCorruptionError(f"bin[{p}][{q}] carries an id stream but is tagged partition-centric")
            r0, r1 = base + con, base + pub
            counts = row.dest_count[r0:r1]
            vals = np.repeat(self.data[p][r0:r1], counts)
            d0, d1 = int(row.rec_dst_start[r0]), int(row.rec_dst_start[r1])
            dst = row.dst_local[d0:d1]
            w = row.weights[d0:d1] if self.weighted else None
        else:
            raise BinCorruptionError(f"bin[{p}][{q}] has records but no mode tag")
        self.consumed[p, q] = pub
        return vals, dst, (w if self.weighted else None), pub - con
