"""Acceptance criteria, one test each.

Every test records a ``criterion N ... PASS|FAIL`` line; the lines are echoed
in the pytest terminal summary and by running this file directly.  Timing
criteria are advisory: their lines are printed but never fail the build.
"""

import os
import random
import sys
import time
from functools import lru_cache

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pcgraph import (Engine, EngineConfig, PartitionLayout, assign_weights, build_csr, build_png,
                     choose_partition_count, generate_rmat, make_bfs, make_cc, make_nibble,
                     make_pagerank, make_sssp, symmetrize)
from pcgraph.model import INDEX_BYTES, SC
from pcgraph.oracle import (check_bfs_parents, max_relative_error, oracle_bfs, oracle_cc,
                            oracle_dijkstra, oracle_message_count, oracle_nibble, oracle_pagerank)
from conftest import HAND_GRAPHS, graph_from, weighted

RESULTS = {}

THREADS = (1, 2, 4, 8)
MODES = ("sc", "pc", "dc")


def record(num, name, ok, detail, enforced=True):
    status = "PASS" if ok else "FAIL"
    if not enforced:
        status += " (advisory)"
    line = f"criterion {num:>2} {name}: {status} {detail}"
    RESULTS[num] = line
    print(line)
    return ok


@lru_cache(maxsize=None)
def rmat(scale, degree=16, seed=1):
    return build_csr(generate_rmat(scale, degree, seed=seed))


@lru_cache(maxsize=None)
def rmat_weighted(scale):
    return assign_weights(rmat(scale), seed=scale)


@lru_cache(maxsize=None)
def rmat_sym(scale):
    return symmetrize(rmat(scale))


class Suite:
    """A family of graphs with oracle answers computed once."""

    def __init__(self, name, g, gw, gs, root=0):
        self.name, self.g, self.gw, self.gs, self.root = name, g, gw, gs, root
        self.levels = oracle_bfs(g, root).values
        self.dist = oracle_dijkstra(gw, root).values
        self.labels = oracle_cc(gs).values


def run_engine(g, program, **cfg):
    cfg.setdefault("check_ownership", True)
    with Engine(g, program, EngineConfig(**cfg)) as eng:
        result = eng.run_until()
        return result, list(eng.ownership_violations), eng


def exact_sweep(suite, threads=THREADS, modes=MODES, **extra):
    """Mismatch descriptions for BFS/SSSP/CC over every configuration."""
    bad = []
    for t in threads:
        for mode in modes:
            tag = f"{suite.name} t={t} mode={mode}"
            res, viol, _ = run_engine(suite.g, make_bfs(suite.g, suite.root), threads=t, mode=mode, **extra)
            probs = check_bfs_parents(suite.g, suite.root, res.values, suite.levels) + viol
            if probs:
                bad.append(f"bfs {tag}: {probs[0]}")
            for isg in (False, True):
                res, viol, _ = run_engine(suite.gw, make_sssp(suite.gw, suite.root), threads=t, mode=mode,
                                          isg=isg, **extra)
                if not np.array_equal(res.values, suite.dist) or viol:
                    bad.append(f"sssp {tag} isg={isg}")
                res, viol, _ = run_engine(suite.gs, make_cc(suite.gs), threads=t, mode=mode, isg=isg, **extra)
                if not np.array_equal(res.values, suite.labels) or viol:
                    bad.append(f"cc {tag} isg={isg}")
    return bad


def hand_suites():
    out = []
    for name in sorted(HAND_GRAPHS):
        n, edges = HAND_GRAPHS[name]
        g = graph_from(n, edges)
        out.append(Suite(name, g, weighted(g), symmetrize(g)))
    return out


def rmat_suite(scale):
    return Suite(f"rmat{scale}", rmat(scale), rmat_weighted(scale), rmat_sym(scale))


def criterion_1():
    t0 = time.perf_counter()
    bad, runs = [], 0
    for suite in hand_suites():
        for k in (None, 3):
            bad += exact_sweep(suite, partitions=k)
            runs += 5 * len(THREADS) * len(MODES)
    for scale in range(10, 15):
        bad += exact_sweep(rmat_suite(scale))
        runs += 5 * len(THREADS) * len(MODES)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    detail = f"runs={runs} mismatches={len(bad)} elapsed={elapsed:.1f}s (limit 120s)"
    if bad:
        detail += f" first={bad[0]}"
    return ok, detail, True


def criterion_2():
    g = rmat(12)
    want = oracle_pagerank(g, 0.85, 10).values
    pr_err = {}
    for t in (1, 4):
        for mode in MODES:
            res, _, _ = run_engine(g, make_pagerank(g, 0.85, 10), threads=t, mode=mode)
            pr_err[(t, mode)] = max_relative_error(res.values, want)
    gn = rmat(10)
    nb_err = {}
    for seed in (0, 17, 300):
        want_nb = oracle_nibble(gn, seed, 1e-9).values
        for t in (1, 4):
            for mode in MODES:
                res, _, _ = run_engine(gn, make_nibble(gn, seed, 1e-9), threads=t, mode=mode)
                nb_err[(seed, t, mode)] = max_relative_error(res.values, want_nb)
    pr_max = max(pr_err.values())
    nb1 = max(v for (s, t, m), v in nb_err.items() if t == 1)
    nbt = max(v for (s, t, m), v in nb_err.items() if t > 1)
    ok = pr_max <= 1e-6 and nb1 <= 1e-10 and nbt <= 1e-8
    return ok, (f"pagerank max_rel={pr_max:.2e} (<=1e-6) nibble t=1 max_rel={nb1:.2e} (<=1e-10) "
                f"t>1 max_rel={nbt:.2e} (<=1e-8)"), True


def _per_partition_messages(g, layout, frontier, p):
    lo, hi = layout.bounds(p)
    part = frontier[(frontier >= lo) & (frontier < hi)]
    return oracle_message_count(g, layout.q, part)


def criterion_3():
    checked = mismatches = stale = opened_empty = 0
    cases = [(rmat(12), lambda g: make_bfs(g, 0)), (rmat_weighted(12), lambda g: make_sssp(g, 0)),
             (rmat_sym(11), make_cc), (rmat(10), lambda g: make_nibble(g, 0, 1e-6))]
    for g, factory in cases:
        for mode in ("sc", "dc"):
            for t in (1, 4):
                res, _, eng = run_engine(g, factory(g), threads=t, mode=mode, trace_frontier=True)
                for s in res.stats:
                    stale += s.stale_probes
                    if s.records_gathered != s.messages_written:
                        mismatches += 1
                    for p in np.flatnonzero(s.modes == SC).tolist():
                        msgs, ids = _per_partition_messages(g, eng.layout, s.frontier, p)
                        checked += 1
                        if (s.messages[p], s.ids[p]) != (msgs, ids + msgs):
                            mismatches += 1
        with Engine(g, factory(g)) as eng:
            eng.load(np.array([], dtype=np.int64))
            s = eng.run_iteration()
            opened_empty += s.bin_probes + s.messages_written
    ok = checked > 0 and mismatches == 0 and stale == 0 and opened_empty == 0
    return ok, (f"sc_partition_checks={checked} mismatches={mismatches} stale_probes={stale} "
                f"empty_frontier_probes={opened_empty}"), True


def criterion_4():
    g = rmat(14)
    layout = PartitionLayout.auto(g.num_vertices, make_bfs(g, 0).state_bytes_per_vertex, 1)
    png = build_png(g, layout)
    runs = {}
    for mode in MODES:
        with Engine(g, make_bfs(g, 0), EngineConfig(mode=mode), png=png) as eng:
            runs[mode] = eng.run_until().stats
    same_frontiers = [s.frontier_before for s in runs["sc"]] == [s.frontier_before for s in runs["dc"]] \
        == [s.frontier_before for s in runs["pc"]]
    worst = -np.inf
    over = 0
    for sc, pc, dc in zip(runs["sc"], runs["pc"], runs["dc"]):
        slack = layout.k * INDEX_BYTES * int(np.count_nonzero(dc.modes >= 0))
        margin = dc.chosen_cost - (min(sc.chosen_cost, pc.chosen_cost) + slack)
        worst = max(worst, margin)
        over += margin > 0
    totals = {m: sum(s.chosen_cost for s in runs[m]) for m in MODES}
    pc_iters = sum(1 for s in runs["dc"] if s.pc_partitions)
    ok = same_frontiers and over == 0 and pc_iters >= 1
    return ok, (f"iterations={len(runs['dc'])} violations={over} worst_margin={worst:.0f}B "
                f"modelled_total sc={totals['sc']:.3g} pc={totals['pc']:.3g} dc={totals['dc']:.3g} "
                f"dc_iters_with_pc={pc_iters}"), True


def _wall(g, program_factory, mode, threads=4, repeats=3):
    """Best-of-``repeats`` wall time of a full run, preprocessing excluded."""
    best = np.inf
    with Engine(g, program_factory(g), EngineConfig(threads=threads, mode=mode)) as eng:
        for _ in range(repeats):
            eng.load()
            t0 = time.perf_counter()
            eng.run_until()
            best = min(best, time.perf_counter() - t0)
    return best


def criterion_5():
    g, gs = rmat(16), rmat_sym(16)
    parts = []
    ok = True
    for name, graph, factory in (("pagerank", g, make_pagerank), ("cc", gs, make_cc)):
        times = {m: _wall(graph, factory, m) for m in MODES}
        ratio = times["dc"] / min(times["sc"], times["pc"])
        ok &= ratio <= 1.1
        parts.append(f"{name} sc={times['sc']:.2f}s pc={times['pc']:.2f}s dc={times['dc']:.2f}s "
                     f"dc/min={ratio:.2f} (<=1.1)")
    return ok, "; ".join(parts), False


def _chain_iterations(isg):
    n = 64
    g = graph_from(n, [(i, i + 1) for i in range(n - 1)]).with_weights(np.arange(1, n))
    res, viol, _ = run_engine(g, make_sssp(g, 0), partitions=8, isg=isg)
    correct = np.array_equal(res.values, oracle_dijkstra(g, 0).values) and not viol
    return res.iterations, correct


def criterion_6():
    plain, ok_plain = _chain_iterations(False)
    isg, ok_isg = _chain_iterations(True)
    gs = rmat_sym(12)
    labels = oracle_cc(gs).values
    cc_ok = True
    for t in (1, 4):
        res, viol, _ = run_engine(gs, make_cc(gs), threads=t, isg=True)
        cc_ok &= np.array_equal(res.values, labels) and not viol
    ok = ok_plain and ok_isg and isg < plain and cc_ok
    return ok, f"chain64 k=8 iterations without_isg={plain} with_isg={isg}; cc rmat12 isg t=1,4 match={cc_ok}", True


def criterion_7():
    g = rmat(16)
    t1 = _wall(g, make_pagerank, "dc", threads=1)
    t4 = _wall(g, make_pagerank, "dc", threads=4)
    speedup = t1 / t4
    return speedup >= 2.0, f"t1={t1:.2f}s t4={t4:.2f}s speedup={speedup:.2f}x (>=2.0) cores={os.cpu_count()}", False


def _in_neighbors(g):
    src = np.repeat(np.arange(g.num_vertices), np.diff(g.offsets))
    out = [set() for _ in range(g.num_vertices)]
    for u, v in zip(src.tolist(), g.neighbors.tolist()):
        out[v].add(u)
    return out


def criterion_8():
    cases = [(graph_from(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]), 0, 1e-3),
             (rmat(10), 0, 1e-6), (rmat(10), 41, 1e-7)]
    iters_checked = mismatches = silent = 0
    for g, seed, eps in cases:
        want = oracle_nibble(g, seed, eps)
        preds = _in_neighbors(g)
        fronts = want.meta["frontiers"] + [want.meta["final_frontier"]]
        for i in range(len(fronts) - 1):
            for v in set(fronts[i]) & set(fronts[i + 1]):
                if not preds[v] & set(fronts[i]):
                    silent += 1
        for t in (1, 4):
            res, _, eng = run_engine(g, make_nibble(g, seed, eps), threads=t, trace_frontier=True)
            got = [s.frontier.tolist() for s in res.stats] + [eng.frontier().tolist()]
            iters_checked += len(got)
            mismatches += got != fronts
    ok = mismatches == 0 and silent > 0
    return ok, (f"iterations_compared={iters_checked} mismatched_runs={mismatches} "
                f"retained_without_message={silent}"), True


def criterion_9():
    rng = random.Random(2024)
    failures = 0
    for _ in range(1000):
        V = rng.randint(1, 10 ** 8)
        sb = rng.randint(1, 64)
        cache = rng.choice([2 ** rng.randint(10, 22), rng.randint(1, 2 ** 22)])
        t = rng.randint(1, 64)
        k = choose_partition_count(V, sb, cache, t)

        def fits(kk):
            return kk >= 4 * t and kk * cache >= V * sb

        failures += not fits(k) or fits(k - 1)
    return failures == 0, f"tuples=1000 failures={failures}", True


def criterion_10():
    problems = []
    cases = 0
    for scale in (10, 12):
        suite = rmat_suite(scale)
        for seed in range(6):
            bad = exact_sweep(suite, threads=(8,), modes=MODES, shuffle_seed=seed)
            problems += bad
            cases += 5 * len(MODES)
    for seed in range(4):
        g = rmat(12)
        res, viol, _ = run_engine(g, make_pagerank(g), threads=8, shuffle_seed=seed)
        problems += viol
        if max_relative_error(res.values, oracle_pagerank(g).values) > 1e-6:
            problems.append(f"pagerank shuffle_seed={seed}")
        cases += 1
    return not problems, (f"randomised T=8 runs={cases} ownership_or_result_problems={len(problems)} "
                          f"(ownership instrumentation stands in for a race detector)"), True


CRITERIA = [
    (1, "oracle equivalence (exact)", criterion_1),
    (2, "oracle equivalence (numeric)", criterion_2),
    (3, "work efficiency counters", criterion_3),
    (4, "mode-selection model", criterion_4),
    (5, "dual-mode speed smoke", criterion_5),
    (6, "interleaved scatter-gather convergence", criterion_6),
    (7, "thread scaling smoke", criterion_7),
    (8, "selective frontier continuity", criterion_8),
    (9, "partition count rules", criterion_9),
    (10, "concurrency safety", criterion_10),
]


@pytest.mark.slow
@pytest.mark.parametrize("num, name, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn):
    ok, detail, enforced = fn()
    record(num, name, ok, detail, enforced)
    if enforced:
        assert ok, RESULTS[num]


if __name__ == "__main__":
    for num, name, fn in CRITERIA:
        ok, detail, enforced = fn()
        record(num, name, ok, detail, enforced)
