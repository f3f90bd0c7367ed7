"""Multi-root timed BFS benchmark (Graph500 protocol) and its report."""

from __future__ import annotations

import logging
import math
import platform
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from etbfs.graph import UNSET, BfsTree, CsrGraph, RawEdgeList, build_csr
from etbfs.io import read_graph
from etbfs.kernels import (
    KERNEL_NAMES,
    NEVER_SWITCH,
    HybridPolicy,
    _traverse,
    et_bfs,
    max_workers,
    worker_threads,
)
from etbfs.kronecker import KroneckerParams, generate_kronecker
from etbfs.preprocess import (
    classify_and_relayout,
    compute_peak_height,
    remove_zero_vertices,
    round_robin_relabel,
    split_degree_aware,
    type_counts,
)
from etbfs.validation import validate_bfs_tree

log = logging.getLogger(__name__)

SCHEMA = "etbfs.bench/1"
OPTIMIZATIONS = ("rm-zero", "round-robin", "degree-aware", "block-search", "et")
_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


def compute_gteps(traversed_edges: int, elapsed: float) -> float:
    if not elapsed > 0:
        raise ValueError(f"elapsed time must be positive, got {elapsed}")
    return traversed_edges / elapsed / 1e9


def _splitmix64(seed: int, counter: int) -> int:
    z = (seed + (counter + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def select_roots(graph: CsrGraph, count: int, seed: int) -> list[int]:
    """Uniform draws over vertices with degree >= 1, distinct while possible."""
    if count < 1:
        raise ValueError("root count must be >= 1")
    deg = graph.degrees
    eligible = int((deg > 0).sum())
    if eligible == 0:
        raise ValueError("graph has no vertex with nonzero degree")
    n = graph.vertex_count
    roots, seen = [], set()
    counter = 0
    while len(roots) < count:
        v = _splitmix64(seed & _MASK64, counter) % n
        counter += 1
        if deg[v] == 0 or (v in seen and len(seen) < eligible):
            continue
        seen.add(v)
        roots.append(v)
    return roots


@dataclass
class BenchConfig:
    kernel: str = "hybrid"
    mh: int = 0
    roots: int = 64
    seed: int = 1
    threads: int = 1
    alpha: float = 14.0
    beta: float = 24.0
    optimizations: tuple = ()
    #: "teet" or "teolv"; None picks teolv for mh=0, teet otherwise
    tree_pass: str | None = None
    validate: bool = True
    keep_trees: bool = False

    def resolved(self) -> BenchConfig:
        """Check the configuration and fold the kernel choice into the flag set."""
        if self.kernel not in KERNEL_NAMES:
            raise ConfigError(f"unknown kernel {self.kernel!r}; choose from {', '.join(KERNEL_NAMES)}")
        flags = list(dict.fromkeys(self.optimizations))
        unknown = [f for f in flags if f not in OPTIMIZATIONS]
        if unknown:
            raise ConfigError(f"unknown optimization(s) {unknown}; choose from {', '.join(OPTIMIZATIONS)}")
        if self.roots < 1:
            raise ConfigError("roots must be >= 1")
        if not 1 <= self.threads <= max_workers():
            raise ConfigError(f"threads must be in [1, {max_workers()}]")
        if self.kernel == "top-down" and ({"degree-aware", "block-search"} & set(flags)):
            raise ConfigError("degree-aware / block-search need a bottom-up phase; top-down has none")
        if self.kernel in ("degree-aware", "block-search", "et-bfs"):
            flags.append({"et-bfs": "et"}.get(self.kernel, self.kernel))
        if "et" in flags and self.mh < -1:
            raise ConfigError(f"et needs an edge-tree classification; mh={self.mh} is not one (use -1 or >= 0)")
        if "et" not in flags and self.tree_pass is not None:
            raise ConfigError("tree_pass only applies with the et optimization")
        if self.tree_pass not in (None, "teet", "teolv"):
            raise ConfigError(f"unknown tree pass {self.tree_pass!r}")
        if self.tree_pass == "teolv" and self.mh != 0:
            raise ConfigError("teolv replays leaves only and needs mh=0")
        flags = [f for f in OPTIMIZATIONS if f in flags]
        return BenchConfig(**{**asdict(self), "optimizations": tuple(flags)})

    @property
    def bottom_up(self) -> str:
        if self.kernel == "top-down":
            return "none"
        if "block-search" in self.optimizations:
            return "block-search"
        if "degree-aware" in self.optimizations:
            return "degree-aware"
        return "plain"


@dataclass
class RootResult:
    root: int
    seconds: float
    traversed_edges: int
    gteps: float
    valid: bool | None
    parent: np.ndarray | None = field(default=None, repr=False)

    def levels(self) -> np.ndarray:
        return BfsTree(self.parent, self.root).levels()


@dataclass
class BenchReport:
    config: BenchConfig
    graph: dict
    per_root: list
    preprocessing_seconds: float
    load_seconds: float
    environment: dict
    classification: dict | None = None

    @property
    def gteps(self) -> list[float]:
        return [r.gteps for r in self.per_root]

    @property
    def mean_gteps(self) -> float:
        return statistics.fmean(self.gteps)

    @property
    def all_valid(self) -> bool:
        return all(r.valid is not False for r in self.per_root)

    def aggregate(self) -> dict:
        times = [r.seconds for r in self.per_root]
        return {
            "mean_gteps": self.mean_gteps,
            "min_gteps": min(self.gteps),
            "max_gteps": max(self.gteps),
            "harmonic_mean_seconds": statistics.harmonic_mean(times),
            "mean_seconds": statistics.fmean(times),
            "all_valid": self.all_valid,
        }

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": asdict(self.config),
            "graph": self.graph,
            "classification": self.classification,
            "environment": self.environment,
            "load_seconds": self.load_seconds,
            "preprocessing_seconds": self.preprocessing_seconds,
            "aggregate": self.aggregate(),
            "per_root": [
                {"root": r.root, "seconds": r.seconds, "traversed_edges": r.traversed_edges,
                 "gteps": r.gteps, "valid": r.valid}
                for r in self.per_root
            ],
        }

    def table(self) -> str:
        agg = self.aggregate()
        opts = "+".join(self.config.optimizations) or "-"
        lines = [
            f"kernel {self.config.kernel}  optimizations {opts}  threads {self.config.threads}"
            + (f"  mh {self.config.mh}" if "et" in self.config.optimizations else ""),
            f"graph  {self.graph['vertex_count']} vertices, {self.graph['edge_count']} edges",
            f"preprocessing {self.preprocessing_seconds:.3f} s (excluded from GTEPS)",
            f"{'root':>12} {'seconds':>10} {'edges':>12} {'GTEPS':>9} valid",
        ]
        for r in self.per_root:
            lines.append(f"{r.root:>12} {r.seconds:>10.6f} {r.traversed_edges:>12} {r.gteps:>9.4f} {r.valid}")
        lines.append(
            f"mean {agg['mean_gteps']:.4f} GTEPS  min {agg['min_gteps']:.4f}  max {agg['max_gteps']:.4f}  "
            f"hmean time {agg['harmonic_mean_seconds']:.6f} s  all valid: {agg['all_valid']}"
        )
        return "\n".join(lines)


def load_graph(source) -> tuple[CsrGraph, dict]:
    """Accepts a CsrGraph, RawEdgeList, KroneckerParams, or a graph file path."""
    info = {}
    if isinstance(source, CsrGraph):
        graph = source
    else:
        if isinstance(source, KroneckerParams):
            raw = generate_kronecker(source)
            info.update(scale=source.scale, edgefactor=source.edgefactor, generator_seed=source.seed)
        elif isinstance(source, RawEdgeList):
            raw = source
        else:
            raw = read_graph(source)
            info["path"] = str(source)
        graph = build_csr(raw)
        info["edge_tuples"] = len(raw)
    info.update(vertex_count=graph.vertex_count, edge_count=graph.edge_count,
                dropped_edges=graph.dropped_edges)
    return graph, info


def _to_original(labels: np.ndarray, parent: np.ndarray, n: int) -> np.ndarray:
    out = np.full(n, UNSET, dtype=np.int64)
    set_ = parent != UNSET
    out[labels[set_]] = labels[parent[set_]]
    return out


def _build_runner(graph: CsrGraph, config: BenchConfig):
    """Preprocess per the optimization flags; returns (run, labels, classification)
    where ``run(kernel_root) -> kernel_parent`` and ``labels[kernel_id] = original_id``."""
    flags = set(config.optimizations)
    labels = np.arange(graph.vertex_count, dtype=np.int64)
    g = graph
    if "rm-zero" in flags:
        g, kept = remove_zero_vertices(g)
        labels = labels[kept]
    policy = NEVER_SWITCH if config.kernel == "top-down" else HybridPolicy(config.alpha, config.beta)
    bottom_up = config.bottom_up

    if "et" in flags:
        cg = classify_and_relayout(g, config.mh, segments=config.threads if "round-robin" in flags else 1)
        labels = labels[cg.new2old]
        etl = cg.edge_tree_list
        core_kernel = {"none": "top-down", "plain": "hybrid"}.get(bottom_up, bottom_up)
        _ = cg.core_graph
        if bottom_up in ("degree-aware", "block-search"):
            _ = cg.core_split
        classification = {
            "mh": config.mh,
            "peak_height": compute_peak_height(g),
            "counts": type_counts(cg.vertex_type),
            "core_vertex_count": cg.core_vertex_count,
            "edge_tree_entries": len(etl),
            "tree_sizes": etl.tree_size_stats(),
        }

        def run(root):
            return et_bfs(cg, etl, root, core_kernel, config.tree_pass, policy).parent

        return run, labels, classification

    if "round-robin" in flags:
        g, order = round_robin_relabel(g, config.threads)
        labels = labels[order]
    split = split_degree_aware(g) if bottom_up in ("degree-aware", "block-search") else None
    mode = "plain" if bottom_up == "none" else bottom_up

    def run(root):
        return _traverse(g.row_offsets, g.col_indices, root, policy, mode, split)[0]

    return run, labels, None


def run_benchmark(source, config: BenchConfig) -> BenchReport:
    """Time ``config.roots`` traversals; preprocessing and validation are untimed."""
    config = config.resolved()
    t0 = time.perf_counter()
    graph, info = load_graph(source)
    load_seconds = time.perf_counter() - t0
    roots = select_roots(graph, config.roots, config.seed)
    n = graph.vertex_count

    with worker_threads(config.threads):
        t0 = time.perf_counter()
        run, labels, classification = _build_runner(graph, config)
        old2new = np.full(n, -1, dtype=np.int64)
        old2new[labels] = np.arange(labels.size, dtype=np.int64)
        preprocessing_seconds = time.perf_counter() - t0

        run(int(old2new[roots[0]]))  # JIT warm-up, untimed
        results = []
        for root in roots:
            kroot = int(old2new[root])
            t0 = time.perf_counter()
            kparent = run(kroot)
            elapsed = time.perf_counter() - t0
            parent = _to_original(labels, kparent, n)
            tree = BfsTree(parent, root)
            if config.validate:
                report = validate_bfs_tree(graph, tree)
                valid, edges = report.passed, report.traversed_edge_count
                if not valid:
                    log.warning("root %d failed validation:\n%s", root, report.summary())
            else:
                valid, edges = None, int(graph.degrees[parent != UNSET].sum() // 2)
            results.append(RootResult(root, elapsed, edges, compute_gteps(edges, elapsed), valid,
                                      parent if config.keep_trees else None))

    env = {
        "threads": config.threads,
        "python": platform.python_version(),
        "machine": platform.machine(),
        "timer": "time.perf_counter",
    }
    return BenchReport(config, info, results, preprocessing_seconds, load_seconds, env, classification)


def gteps_ratio(report: BenchReport, baseline: BenchReport) -> float:
    """Ratio of mean GTEPS, ``report / baseline``."""
    if baseline.mean_gteps == 0:
        return math.inf
    return report.mean_gteps / baseline.mean_gteps
