"""Command-line driver: load or generate a graph, run one algorithm, report.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .engine import MODES, Engine, EngineConfig, IterationStats
from .errors import ConfigError, EdgeListParseError
from .graph import (RMAT_DEFAULT_PROBS, assign_weights, build_csr, generate_rmat, load_binary,
                    load_edge_list, symmetrize)
from .programs import make_bfs, make_cc, make_nibble, make_pagerank, make_sssp
from . import oracle

ALGOS = ("pagerank", "bfs", "sssp", "cc", "nibble")
IDEMPOTENT_ALGOS = ("sssp", "cc")

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3

PAGERANK_TOL = 1e-6
NIBBLE_TOL = 1e-10
NIBBLE_TOL_THREADED = 1e-8


@dataclass
class RunConfig:
    algo: str
    input: Optional[str] = None
    format: str = "text"
    rmat_scale: Optional[int] = None
    rmat_degree: int = 16
    rmat_probs: Tuple[float, float, float, float] = RMAT_DEFAULT_PROBS
    seed: int = 1
    weight_seed: int = 1
    weighted: bool = False
    threads: int = 1
    partitions: Optional[int] = None
    cache_kb: int = 256
    mode: str = "dc"
    isg: bool = False
    bw_ratio: float = 2.0
    source: int = 0
    epsilon: float = 1e-9
    damping: float = 0.85
    iters: Optional[int] = None
    verify: bool = False
    dump_values: bool = False

    def validate(self) -> None:
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        if (self.input is None) == (self.rmat_scale is None):
            raise ConfigError("give exactly one of --input or --rmat-scale")
        if self.isg and self.algo not in IDEMPOTENT_ALGOS:
            raise ConfigError("isg requires idempotent gather (sssp or cc)")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


@dataclass
class RunReport:
    lines: List[str] = field(default_factory=list)
    verdicts: List[Tuple[str, bool]] = field(default_factory=list)
    values: Optional[np.ndarray] = None

    @property
    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.verdicts)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pcgraph", description=__doc__.splitlines()[0])
    ap.add_argument("--algo", required=True, choices=ALGOS)
    src = ap.add_argument_group("input")
    src.add_argument("--input", help="edge list (text) or binary CSR file")
    src.add_argument("--format", choices=("text", "bin"), default="text")
    src.add_argument("--rmat-scale", type=int, help="generate an RMAT graph with 2^scale vertices")
    src.add_argument("--rmat-degree", type=int, default=16)
    src.add_argument("--rmat-probs", type=float, nargs=4, metavar=("A", "B", "C", "D"),
                     default=RMAT_DEFAULT_PROBS)
    src.add_argument("--seed", type=int, default=1, help="RMAT seed")
    src.add_argument("--weight-seed", type=int, default=1)
    src.add_argument("--weighted", action="store_true",
                     help="use file weights, or draw integer weights in [1, log2 V] if absent")
    eng = ap.add_argument_group("engine")
    eng.add_argument("--threads", type=int, default=None, help="default: $GPOP_THREADS or 1")
    eng.add_argument("--partitions", type=int, default=None)
    eng.add_argument("--cache-kb", type=int, default=256)
    eng.add_argument("--mode", choices=MODES, default="dc")
    eng.add_argument("--isg", action="store_true")
    eng.add_argument("--bw-ratio", type=float, default=2.0)
    alg = ap.add_argument_group("algorithm")
    alg.add_argument("--source", type=int, default=0)
    alg.add_argument("--epsilon", type=float, default=1e-9)
    alg.add_argument("--damping", type=float, default=0.85)
    alg.add_argument("--iters", type=int, default=None,
                     help="iteration cap (pagerank default 10, nibble 500)")
    ap.add_argument("--verify", action="store_true", help="check against the serial oracle")
    ap.add_argument("--dump-values", action="store_true", help="print the result array")
    return ap


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    threads = ns.threads
    if threads is None:
        env = os.environ.get("GPOP_THREADS")
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise ConfigError(f"GPOP_THREADS must be an integer, got {env!r}") from None
    cfg = RunConfig(algo=ns.algo, input=ns.input, format=ns.format, rmat_scale=ns.rmat_scale,
                    rmat_degree=ns.rmat_degree, rmat_probs=tuple(ns.rmat_probs), seed=ns.seed,
                    weight_seed=ns.weight_seed, weighted=ns.weighted, threads=threads,
                    partitions=ns.partitions, cache_kb=ns.cache_kb, mode=ns.mode, isg=ns.isg,
                    bw_ratio=ns.bw_ratio, source=ns.source, epsilon=ns.epsilon, damping=ns.damping,
                    iters=ns.iters, verify=ns.verify, dump_values=ns.dump_values)
    cfg.validate()
    return cfg


def load_graph(cfg: RunConfig):
    if cfg.rmat_scale is not None:
        g = build_csr(generate_rmat(cfg.rmat_scale, cfg.rmat_degree, cfg.rmat_probs, cfg.seed))
    elif cfg.format == "bin":
        g = load_binary(cfg.input)
    else:
        g = build_csr(load_edge_list(cfg.input, weighted=None if cfg.algo == "sssp" or cfg.weighted else False))
    if cfg.algo == "sssp":
        if not g.weighted:
            if not cfg.weighted:
                raise ConfigError("sssp needs edge weights: pass --weighted or a weighted input")
            g = assign_weights(g, cfg.weight_seed)
    if cfg.algo == "cc":
        g = symmetrize(g)
    return g


def make_program(cfg: RunConfig, g):
    if cfg.algo == "pagerank":
        return make_pagerank(g, cfg.damping, cfg.iters if cfg.iters is not None else 10)
    if cfg.algo == "bfs":
        return make_bfs(g, cfg.source)
    if cfg.algo == "sssp":
        return make_sssp(g, cfg.source)
    if cfg.algo == "cc":
        return make_cc(g)
    return make_nibble(g, cfg.source, cfg.epsilon, cfg.iters if cfg.iters is not None else 500)


def verify(cfg: RunConfig, g, values: np.ndarray) -> List[Tuple[str, bool]]:
    if cfg.algo == "bfs":
        levels = oracle.oracle_bfs(g, cfg.source).values
        reach = np.array_equal(values >= 0, levels >= 0)
        return [("bfs_reachability", reach),
                ("bfs_parent_validity", not oracle.check_bfs_parents(g, cfg.source, values, levels))]
    if cfg.algo == "sssp":
        return [("sssp_dijkstra", np.array_equal(values, oracle.oracle_dijkstra(g, cfg.source).values))]
    if cfg.algo == "cc":
        return [("cc_union_find", np.array_equal(values, oracle.oracle_cc(g).values))]
    if cfg.algo == "pagerank":
        want = oracle.oracle_pagerank(g, cfg.damping, cfg.iters if cfg.iters is not None else 10).values
        return [("pagerank_rel_err", oracle.max_relative_error(values, want) <= PAGERANK_TOL)]
    want = oracle.oracle_nibble(g, cfg.source, cfg.epsilon, cfg.iters if cfg.iters is not None else 500).values
    tol = NIBBLE_TOL if cfg.threads == 1 else NIBBLE_TOL_THREADED
    return [("nibble_rel_err", oracle.max_relative_error(values, want) <= tol)]


def format_iteration(s: IterationStats) -> str:
    return (f"iter={s.iteration} frontier={s.frontier_before} msgs={s.messages_written} "
            f"ids={s.ids_written} sc={s.sc_partitions} pc={s.pc_partitions} "
            f"scatter_ms={s.scatter_ms:.3f} gather_ms={s.gather_ms:.3f}")


def emit_report(stats: Sequence[IterationStats], verdicts: Sequence[Tuple[str, bool]] = (),
                summary: Optional[dict] = None) -> str:
    lines = [format_iteration(s) for s in stats]
    summary = dict(summary or {})
    summary.setdefault("iterations", len(stats))
    summary.setdefault("total_msgs", sum(s.messages_written for s in stats))
    summary.setdefault("total_ids", sum(s.ids_written for s in stats))
    summary.setdefault("sc_scatters", sum(s.sc_partitions for s in stats))
    summary.setdefault("pc_scatters", sum(s.pc_partitions for s in stats))
    summary.setdefault("scatter_ms", f"{sum(s.scatter_ms for s in stats):.3f}")
    summary.setdefault("gather_ms", f"{sum(s.gather_ms for s in stats):.3f}")
    lines.extend(f"{key}={value}" for key, value in summary.items())
    lines.extend(f"check={name} status={'PASS' if ok else 'FAIL'}" for name, ok in verdicts)
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> Tuple[RunReport, int]:
    report = RunReport()
    t0 = time.perf_counter()
    g = load_graph(cfg)
    program = make_program(cfg, g)
    ecfg = EngineConfig(threads=cfg.threads, mode=cfg.mode, isg=cfg.isg, bw_ratio=cfg.bw_ratio,
                        partitions=cfg.partitions, cache_bytes=cfg.cache_kb * 1024)
    t1 = time.perf_counter()
    with Engine(g, program, ecfg) as engine:
        t2 = time.perf_counter()
        result = engine.run_until(cfg.iters if cfg.algo not in ("pagerank", "nibble") else None)
        t3 = time.perf_counter()
        k = engine.k
    values = result.values
    if cfg.verify:
        report.verdicts = verify(cfg, g, values)
    summary = {"algo": cfg.algo, "vertices": g.num_vertices, "edges": g.num_edges, "partitions": k,
               "threads": cfg.threads, "mode": cfg.mode, "isg": int(cfg.isg),
               "load_ms": f"{1e3 * (t1 - t0):.3f}", "preprocess_ms": f"{1e3 * (t2 - t1):.3f}",
               "total_ms": f"{1e3 * (t3 - t2):.3f}"}
    text = emit_report(result.stats, report.verdicts, summary)
    if cfg.dump_values:
        text += "values=" + " ".join(str(x) for x in values.tolist()) + "\n"
    report.lines = text.rstrip("\n").split("\n")
    report.values = values
    return report, (EXIT_OK if report.passed else EXIT_VERIFY)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except ConfigError as exc:
        print(f"pcgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        report, code = run(cfg)
    except (OSError, EdgeListParseError) as exc:
        print(f"pcgraph: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"pcgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report.text)
    return code


if __name__ == "__main__":
    sys.exit(main())
