"""Partition-centric scatter/gather execution.

One iteration is a scatter phase and a gather phase separated by full
barriers.  Within a phase, worker threads claim whole partitions from a
shared queue and own them exclusively: the scatter owner of ``p`` writes row
``bin[p][:]`` and the state of ``p``'s vertices, the gather owner of ``q``
reads column ``bin[:][q]`` and updates ``q``'s vertices.

The only shared mutable metadata outside the bins are the work queues and
the two-level active list (``gPartList`` over ``binPartList[q]``); both are
touched once per partition pair per iteration under a lock.
"""

from __future__ import annotations

import logging
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .bins import BinMatrix, sc_scatter_kernel
from .errors import ConfigError
from .graph import Graph
from .model import INDEX_BYTES, PC, SC, ModeInputs, pc_volume, sc_volume, select_mode
from .partition import DEFAULT_CACHE_BYTES, PNG, PartitionLayout, build_png
from .programs import VertexProgram

log = logging.getLogger(__name__)

MODES = ("sc", "pc", "dc")
UNSCATTERED = -1

_IDLE, _QUEUED, _DONE = 0, 1, 2
_EMPTY_IDS = np.zeros(0, dtype=np.int64)


@dataclass
class EngineConfig:
    threads: int = 1
    mode: str = "dc"
    isg: bool = False
    bw_ratio: float = 2.0
    partitions: Optional[int] = None
    cache_bytes: int = DEFAULT_CACHE_BYTES
    exact_sc_count: bool = False
    # instrumentation
    trace_frontier: bool = False
    record_writes: bool = False
    check_ownership: bool = False
    shuffle_seed: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.bw_ratio <= 0:
            raise ConfigError("bw_ratio must be positive")


@dataclass
class IterationStats:
    iteration: int
    frontier_before: int
    modes: np.ndarray
    messages: np.ndarray
    ids: np.ndarray
    frontier_after: int = 0
    scatter_ms: float = 0.0
    gather_ms: float = 0.0
    bin_probes: int = 0
    bins_opened: int = 0
    stale_probes: int = 0
    records_gathered: int = 0
    isg_records: int = 0
    sc_cost: float = 0.0
    pc_cost: float = 0.0
    chosen_cost: float = 0.0
    frontier: Optional[np.ndarray] = None

    @property
    def messages_written(self) -> int:
        return int(self.messages.sum())

    @property
    def ids_written(self) -> int:
        return int(self.ids.sum())

    @property
    def sc_partitions(self) -> int:
        return int(np.count_nonzero(self.modes == SC))

    @property
    def pc_partitions(self) -> int:
        return int(np.count_nonzero(self.modes == PC))


@dataclass
class RunResult:
    program: VertexProgram
    stats: List[IterationStats] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.stats)

    @property
    def values(self) -> np.ndarray:
        return self.program.result()


class _WorkQueue:
    """Partitions claimed one at a time; may grow while being drained."""

    def __init__(self, items, rng: Optional[random.Random] = None):
        self._items = list(items)
        self._next = 0
        self._lock = threading.Lock()
        self._rng = rng

    def push(self, item: int) -> None:
        with self._lock:
            self._items.append(item)

    def claim(self) -> Optional[int]:
        with self._lock:
            if self._next >= len(self._items):
                return None
            if self._rng is not None:
                j = self._rng.randrange(self._next, len(self._items))
                items = self._items
                items[self._next], items[j] = items[j], items[self._next]
            item = self._items[self._next]
            self._next += 1
            return item

    @property
    def items(self) -> list:
        return self._items


class Engine:
    """Runs a vertex program over a graph.

    ``layout`` and ``png`` may be shared between engines on the same graph;
    otherwise they are derived from the config and the program's footprint.
    """

    def __init__(self, graph: Graph, program: VertexProgram, config: Optional[EngineConfig] = None,
                 layout: Optional[PartitionLayout] = None, png: Optional[PNG] = None):
        self.config = config = config or EngineConfig()
        if program.weighted and not graph.weighted:
            raise ConfigError(f"{program.name} requires a weighted graph")
        if config.isg and not program.idempotent_gather:
            raise ConfigError("isg requires idempotent gather")
        if png is not None:
            layout = png.layout
        if layout is None:
            if config.partitions:
                layout = PartitionLayout.with_partitions(graph.num_vertices, config.partitions,
                                                         program.state_bytes_per_vertex, config.cache_bytes)
            else:
                layout = PartitionLayout.auto(graph.num_vertices, program.state_bytes_per_vertex,
                                              config.threads, config.cache_bytes)
        self.graph = graph
        self.program = program
        self.layout = layout
        self.png = png if png is not None else build_png(graph, layout)
        self.k = k = layout.k
        self.bins = BinMatrix(self.png, program.value_dtype, program.weighted, config.record_writes)
        self._deg = graph.out_degree
        self._empty_w = np.zeros(0, dtype=np.int64)
        self._weights = graph.weights if program.weighted else self._empty_w
        self._lock = threading.Lock()
        self._rng = random.Random(config.shuffle_seed) if config.shuffle_seed is not None else None
        self._pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None

        n = graph.num_vertices
        self._cur_mask = np.zeros(n, dtype=bool)
        self._next_mask = np.zeros(n, dtype=bool)
        self._cur: List[np.ndarray] = [_EMPTY_IDS] * k
        self._next: List[list] = [[] for _ in range(k)]
        self._s_parts: List[int] = []
        self._scatter_state = np.zeros(k, dtype=np.int8)
        self._queue: Optional[_WorkQueue] = None
        # two-level active list
        self.g_part_list: List[int] = []
        self._g_flag = np.zeros(k, dtype=bool)
        self.bin_part_list: List[List[int]] = [[] for _ in range(k)]
        self._registered = np.zeros((k, k), dtype=bool)
        self._retained_parts: List[int] = []
        self._retained_flag = np.zeros(k, dtype=bool)
        self._owner = {}
        self.ownership_violations: List[str] = []
        self.iteration = 0
        self._stats: Optional[IterationStats] = None
        self._probes = np.zeros(k, dtype=np.int64)
        self._opened = np.zeros(k, dtype=np.int64)
        self._stale = np.zeros(k, dtype=np.int64)
        self._gathered = np.zeros(k, dtype=np.int64)
        self._isg_records = np.zeros(k, dtype=np.int64)
        self._costs = np.zeros((k, 3))
        self.load()

    # -- lifecycle -------------------------------------------------------

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def load(self, frontier: Optional[np.ndarray] = None) -> None:
        """Reset program state and distribute the initial frontier."""
        initial = self.program.load_frontier() if frontier is None else np.asarray(frontier)
        initial = np.unique(np.asarray(initial, dtype=np.int64))
        for p in self._s_parts:
            self._cur_mask[self._cur[p]] = False
        self._cur = [_EMPTY_IDS] * self.k
        self._cur_mask[initial] = True
        cuts = np.searchsorted(initial, np.arange(1, self.k) * self.layout.q)
        for p, chunk in enumerate(np.split(initial, cuts)):
            self._cur[p] = chunk
        self._s_parts = [p for p in range(self.k) if len(self._cur[p])]
        self.iteration = 0
        self._stats = self._fresh_stats()

    def _fresh_stats(self) -> IterationStats:
        k = self.k
        return IterationStats(self.iteration + 1, self.frontier_size,
                              modes=np.full(k, UNSCATTERED, dtype=np.int8),
                              messages=np.zeros(k, dtype=np.int64), ids=np.zeros(k, dtype=np.int64))

    @property
    def frontier_size(self) -> int:
        return sum(len(self._cur[p]) for p in self._s_parts)

    def frontier(self) -> np.ndarray:
        if not self._s_parts:
            return _EMPTY_IDS
        return np.sort(np.concatenate([self._cur[p] for p in self._s_parts]))

    # -- ownership instrumentation --------------------------------------

    def _claim(self, phase: str, p: int) -> None:
        if self.config.check_ownership:
            key = (phase, p)
            me = threading.get_ident()
            with self._lock:
                if key in self._owner and self._owner[key] != me:
                    self.ownership_violations.append(f"{phase} partition {p} claimed twice")
                self._owner[key] = me

    def _assert_owner(self, phase: str, p: int) -> None:
        if self.config.check_ownership and self._owner.get((phase, p)) != threading.get_ident():
            self.ownership_violations.append(f"{phase} access to partition {p} by non-owner")

    # -- phase machinery ------------------------------------------------

    def _drain(self, queue: _WorkQueue, phase: str, task: Callable[[int], None]) -> None:
        while True:
            p = queue.claim()
            if p is None:
                return
            self._claim(phase, p)
            if self._rng is not None:
                time.sleep(0)
            task(p)

    def _run_phase(self, queue: _WorkQueue, phase: str, task) -> None:
        if self._pool is None:
            self._drain(queue, phase, task)
            return
        futures = [self._pool.submit(self._drain, queue, phase, task) for _ in range(self.config.threads)]
        for f in futures:
            f.result()

    def _register(self, p: int, touched: np.ndarray) -> None:
        """Record bins ``bin[p][q]`` that received messages this iteration."""
        for q in touched.tolist():
            if self._registered[p, q]:
                continue
            self._registered[p, q] = True
            with self._lock:
                self.bin_part_list[q].append(p)
                if not self._g_flag[q]:
                    self._g_flag[q] = True
                    self.g_part_list.append(q)
                if self.config.isg and self._scatter_state[q] == _IDLE:
                    self._scatter_state[q] = _QUEUED
                    self._queue.push(q)

    # -- scatter side ---------------------------------------------------

    def mode_inputs(self, p: int, active: np.ndarray) -> ModeInputs:
        png = self.png
        exact = int(png.pdeg[active].sum()) if self.config.exact_sc_count else None
        return ModeInputs(active_vertices=len(active), active_edges=int(self._deg[active].sum()),
                          edges=int(png.edges[p]), ratio=float(png.ratio[p]), sum_pdeg=int(png.sum_pdeg[p]),
                          k=self.k, index_bytes=INDEX_BYTES, value_bytes=self.program.value_bytes,
                          bw_ratio=self.config.bw_ratio, exact_messages=exact)

    def _choose(self, p: int, active: np.ndarray) -> int:
        m = self.mode_inputs(p, active)
        sc_cost, pc_cost = sc_volume(m), pc_volume(m) / m.bw_ratio
        if self.config.mode == "sc":
            mode = SC
        elif self.config.mode == "pc":
            mode = PC
        else:
            mode = select_mode(m)
        self._costs[p] = (sc_cost, pc_cost, pc_cost if mode == PC else sc_cost)
        return mode

    def scatter_sc(self, p: int, active: np.ndarray) -> int:
        """Write aggregated messages of the active vertices of ``p``; returns records written."""
        self._assert_owner("scatter", p)
        bins, row = self.bins, self.png.rows[p]
        senders = active[self._deg[active] > 0]
        bins.mode_tag[p] = SC
        if len(senders) == 0:
            return 0
        vals = np.asarray(self.program.scatter_value(senders), dtype=bins.value_dtype)
        rec_fill = np.zeros(self.k, dtype=np.int64)
        id_fill = np.zeros(self.k, dtype=np.int64)
        rec_part = np.empty(int(self.png.pdeg[senders].sum()), dtype=np.int64)
        nrec = sc_scatter_kernel(senders, vals, self.graph.offsets, self.graph.neighbors,
                                 self._weights, self.program.weighted, self.layout.q,
                                 bins.data[p], row.cell_src_ptr, bins.ids[p], bins.id_base[p],
                                 bins.wts[p], rec_fill, id_fill, rec_part)
        if bins.write_log is not None:
            bins.write_log.extend((p, int(q), 1) for q in rec_part[:nrec])
        # publish only after every record is in place
        bins.id_published[p] = id_fill
        bins.published[p] = rec_fill
        self._stats.messages[p] = nrec
        self._stats.ids[p] = int(id_fill.sum())
        self._register(p, np.flatnonzero(rec_fill))
        return nrec

    def scatter_pc(self, p: int) -> int:
        """Write one value per PNG source entry of ``p``, bin by bin; returns records written."""
        self._assert_owner("scatter", p)
        bins, row = self.bins, self.png.rows[p]
        bins.mode_tag[p] = PC
        if len(row.src) == 0:
            return 0
        src = row.src.astype(np.int64)
        null = self.program.null_value
        if null is None:
            vals = self.program.scatter_value(src)
        else:
            vals = np.full(len(src), null, dtype=bins.value_dtype)
            live = self._cur_mask[src]
            if live.any():
                vals[live] = self.program.scatter_value(src[live])
        data, ptr = bins.data[p], row.cell_src_ptr
        cells = np.flatnonzero(np.diff(ptr))
        for q in cells.tolist():
            s0, s1 = ptr[q], ptr[q + 1]
            data[s0:s1] = vals[s0:s1]
            bins.published[p, q] = s1 - s0
            if bins.write_log is not None:
                bins.write_log.append((p, q, int(s1 - s0)))
        self._stats.messages[p] = len(src)
        self._register(p, cells)
        return len(src)

    def apply_init_phase(self, p: int, active: np.ndarray) -> None:
        self._assert_owner("scatter", p)
        keep = np.asarray(self.program.init(active), dtype=bool)
        retained = active[keep]
        if len(retained):
            self._next_mask[retained] = True
            self._next[p].append(retained)
            if not self._retained_flag[p]:
                self._retained_flag[p] = True
                with self._lock:
                    self._retained_parts.append(p)

    def isg_pregather(self, p: int) -> int:
        """Apply messages already published to ``p`` before it scatters; returns records read."""
        self._assert_owner("scatter", p)
        vals, vids, records = self._collect(p, list(self.bin_part_list[p]), isg=True)
        if records == 0:
            return 0
        self._isg_records[p] += records
        act = np.asarray(self.program.gather(vals, vids), dtype=np.int64)
        fresh = act[~self._cur_mask[act]]
        if len(fresh):
            fresh = np.unique(fresh)
            self._cur_mask[fresh] = True
            self._cur[p] = np.concatenate([self._cur[p], fresh])
        return records

    def _scatter_task(self, p: int) -> None:
        if self.config.isg:
            self.isg_pregather(p)
        active = np.sort(self._cur[p])
        self._cur[p] = active
        self._scatter_state[p] = _DONE
        if len(active) == 0:
            return
        mode = self._choose(p, active)
        self._stats.modes[p] = mode
        if mode == SC:
            self.scatter_sc(p, active)
        else:
            self.scatter_pc(p)
        self.apply_init_phase(p, active)

    # -- gather side ----------------------------------------------------

    def _collect(self, q: int, sources: List[int], isg: bool = False):
        """Read pending records of ``bin[s][q]`` for each listed source."""
        bins = self.bins
        null = self.program.null_value
        vals_parts, dst_parts, w_parts = [], [], []
        records = 0
        for s in sorted(sources):
            self._probes[q] += 1
            if bins.published[s, q] == bins.consumed[s, q]:
                if not isg:
                    self._stale[q] += 1
                continue
            if not isg:
                self._opened[q] += 1
            tag = bins.mode_tag[s]
            vals, dst, w, n = bins.read(s, q)
            records += n
            if null is not None and tag == PC:
                live = vals != null
                if not live.all():
                    vals, dst = vals[live], dst[live]
                    w = None if w is None else w[live]
            vals_parts.append(vals)
            dst_parts.append(dst)
            if w is not None:
                w_parts.append(w)
        if records == 0:
            return None, None, 0
        vals = np.concatenate(vals_parts)
        vids = np.concatenate(dst_parts).astype(np.int64) + q * self.layout.q
        if self.program.weighted:
            vals = self.program.apply_weight(vals, np.concatenate(w_parts))
        return vals, vids, records

    def gather(self, q: int) -> int:
        """Consume all pending messages of column ``q``; returns records read."""
        self._assert_owner("gather", q)
        vals, vids, records = self._collect(q, self.bin_part_list[q])
        if records == 0:
            return 0
        self._gathered[q] += records
        act = np.asarray(self.program.gather(vals, vids), dtype=np.int64)
        fresh = act[~self._next_mask[act]]
        if len(fresh):
            fresh = np.unique(fresh)
            self._next_mask[fresh] = True
            self._next[q].append(fresh)
        return records

    def apply_filter_phase(self, q: int) -> None:
        self._assert_owner("gather", q)
        chunks = self._next[q]
        if not chunks:
            return
        ids = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
        keep = np.asarray(self.program.filter(ids), dtype=bool)
        if not keep.all():
            self._next_mask[ids[~keep]] = False
            ids = ids[keep]
        self._next[q] = [ids] if len(ids) else []

    def _gather_task(self, q: int) -> None:
        if self._g_flag[q]:
            self.gather(q)
        self.apply_filter_phase(q)

    # -- iteration driver -----------------------------------------------

    def run_iteration(self) -> IterationStats:
        stats = self._fresh_stats()
        self.iteration += 1
        if self.config.trace_frontier:
            stats.frontier = self.frontier()
        self._stats = stats
        self._owner.clear()

        t0 = time.perf_counter()
        for p in self._s_parts:
            self._scatter_state[p] = _QUEUED
        self._queue = _WorkQueue(self._s_parts, self._rng)
        self._run_phase(self._queue, "scatter", self._scatter_task)
        t1 = time.perf_counter()
        gather_parts = sorted(set(self.g_part_list) | set(self._retained_parts))
        self._run_phase(_WorkQueue(gather_parts, self._rng), "gather", self._gather_task)
        t2 = time.perf_counter()

        scattered = self._queue.items
        stats.scatter_ms = 1e3 * (t1 - t0)
        stats.gather_ms = 1e3 * (t2 - t1)
        for arr, name in ((self._probes, "bin_probes"), (self._opened, "bins_opened"),
                          (self._stale, "stale_probes"), (self._gathered, "records_gathered"),
                          (self._isg_records, "isg_records")):
            setattr(stats, name, int(arr.sum()))
            arr[:] = 0
        if scattered:
            idx = [p for p in scattered if stats.modes[p] != UNSCATTERED]
            stats.sc_cost, stats.pc_cost, stats.chosen_cost = (float(x) for x in self._costs[idx].sum(axis=0))
        self._finish(scattered, gather_parts)
        stats.frontier_after = self.frontier_size
        return stats

    def _finish(self, scattered: List[int], gather_parts: List[int]) -> None:
        """Reset bins and lists touched this iteration and promote the next frontier."""
        bins = self.bins
        for q in self.g_part_list:
            for p in self.bin_part_list[q]:
                bins.clear_cell(p, q)
                self._registered[p, q] = False
            self.bin_part_list[q] = []
            self._g_flag[q] = False
        self.g_part_list = []
        for p in self._retained_parts:
            self._retained_flag[p] = False
        self._retained_parts = []
        for p in scattered:
            self._scatter_state[p] = _IDLE
            bins.mode_tag[p] = -1
            self._cur_mask[self._cur[p]] = False
            self._cur[p] = _EMPTY_IDS
        self._costs[scattered] = 0.0
        self._cur_mask, self._next_mask = self._next_mask, self._cur_mask
        s_parts = []
        for q in gather_parts:
            if self._next[q]:
                self._cur[q] = self._next[q][0]
                self._next[q] = []
                s_parts.append(q)
        self._s_parts = s_parts
        self._queue = None

    def run_until(self, max_iters: Optional[int] = None, stop_on_empty_frontier: bool = True) -> RunResult:
        """Iterate until the frontier empties or ``max_iters`` (default: the program's) is hit."""
        limit = max_iters if max_iters is not None else self.program.max_iterations
        result = RunResult(self.program)
        while limit is None or len(result.stats) < limit:
            if stop_on_empty_frontier and self.frontier_size == 0:
                break
            result.stats.append(self.run_iteration())
            log.debug("iteration %d: frontier %d -> %d", self.iteration,
                      result.stats[-1].frontier_before, result.stats[-1].frontier_after)
        return result


def run(graph: Graph, program: VertexProgram, config: Optional[EngineConfig] = None,
        max_iters: Optional[int] = None, png: Optional[PNG] = None) -> RunResult:
    """Load ``program`` on ``graph``, run it to completion and release the worker pool."""
    with Engine(graph, program, config, png=png) as engine:
        return engine.run_until(max_iters)
