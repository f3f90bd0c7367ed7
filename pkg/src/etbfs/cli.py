"""Command line: ``etbfs generate | classify | bench | validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from etbfs.bench import OPTIMIZATIONS, BenchConfig, ConfigError, load_graph, run_benchmark
from etbfs.graph import BfsTree, GraphError, build_csr
from etbfs.io import read_graph, read_tree, write_graph, write_tree
from etbfs.kernels import KERNEL_NAMES
from etbfs.kronecker import KroneckerParams, generate_kronecker
from etbfs.preprocess import classify_and_relayout, compute_peak_height, type_counts
from etbfs.validation import validate_bfs_tree

MIN_BENCH_SCALE = 10


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_generate(args):
    params = KroneckerParams(scale=args.scale, edgefactor=args.edgefactor, seed=args.seed,
                             scramble=not args.no_scramble)
    edges = generate_kronecker(params)
    write_graph(args.output, edges, args.format)
    print(f"wrote {len(edges)} edge tuples over {edges.vertex_count} vertices to {args.output}")


def classification_summary(graph, mh):
    cg = classify_and_relayout(graph, mh)
    etl = cg.edge_tree_list
    return {
        "mh": mh,
        "vertex_count": graph.vertex_count,
        "edge_count": graph.edge_count,
        "peak_height": compute_peak_height(graph),
        "counts": type_counts(cg.vertex_type),
        "core_vertex_count": cg.core_vertex_count,
        "edge_tree_entries": len(etl),
        "tree_sizes": etl.tree_size_stats(),
    }


def cmd_classify(args):
    graph = build_csr(read_graph(args.graph, args.format))
    stats = classification_summary(graph, args.mh)
    n = max(stats["vertex_count"], 1)
    print(f"graph {stats['vertex_count']} vertices, {stats['edge_count']} edges; "
          f"mh {stats['mh']}, peak height {stats['peak_height']}")
    for name, count in stats["counts"].items():
        print(f"  {name}  {count:>12}  {100 * count / n:6.2f}%")
    t = stats["tree_sizes"]
    print(f"edge trees: count {t['count']}  mean {t['mean']:.2f}  max {t['max']}  min {t['min']}  "
          f"total {t['total']}")
    if args.out:
        _write_json(args.out, stats)


def cmd_bench(args):
    if args.graph is None:
        if args.scale is None:
            raise ConfigError("give a graph file or --scale")
        if args.scale < MIN_BENCH_SCALE:
            raise ConfigError(f"bench needs scale >= {MIN_BENCH_SCALE} for measurable runs")
        source = KroneckerParams(scale=args.scale, edgefactor=args.edgefactor, seed=args.graph_seed)
    else:
        source = args.graph
    opts = [o for chunk in args.opt for o in chunk.split(",") if o]
    config = BenchConfig(kernel=args.kernel, mh=args.mh, roots=args.roots, seed=args.seed,
                         threads=args.threads, alpha=args.alpha, beta=args.beta,
                         optimizations=tuple(opts), tree_pass=args.tree_pass,
                         validate=not args.no_validate, keep_trees=args.tree_out is not None)
    report = run_benchmark(source, config)
    print(report.table())
    if args.out:
        _write_json(args.out, report.to_dict())
    if args.tree_out:
        first = report.per_root[0]
        write_tree(args.tree_out, BfsTree(first.parent, first.root))
    return 0 if report.all_valid else 1


def cmd_validate(args):
    graph, _ = load_graph(args.graph)
    tree = read_tree(args.tree)
    report = validate_bfs_tree(graph, tree)
    print(report.summary())
    if args.out:
        _write_json(args.out, {
            "passed": report.passed,
            "reached_count": report.reached_count,
            "traversed_edge_count": report.traversed_edge_count,
            "failure_counts": {str(k): v for k, v in report.failure_counts.items()},
            "failures": [list(f) for f in report.failures],
        })
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="etbfs", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a Kronecker graph")
    g.add_argument("--scale", type=int, required=True)
    g.add_argument("--edgefactor", type=int, default=16)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--no-scramble", action="store_true", help="keep raw R-MAT vertex labels")
    g.add_argument("--format", choices=("binary", "text"), help="default: from the file suffix (.etg = binary)")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="edge-tree classification statistics")
    c.add_argument("graph")
    c.add_argument("--mh", type=int, default=-1)
    c.add_argument("--format", choices=("binary", "text"))
    c.add_argument("--out", help="write statistics as JSON")
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("bench", help="timed multi-root BFS")
    b.add_argument("graph", nargs="?")
    b.add_argument("--scale", type=int, help="generate a Kronecker graph instead of reading one")
    b.add_argument("--edgefactor", type=int, default=16)
    b.add_argument("--graph-seed", type=int, default=1)
    b.add_argument("--kernel", choices=KERNEL_NAMES, default="hybrid")
    b.add_argument("--opt", action="append", default=[],
                   help=f"optimization flags, comma separated or repeated: {', '.join(OPTIMIZATIONS)}")
    b.add_argument("--mh", type=int, default=0)
    b.add_argument("--tree-pass", choices=("teet", "teolv"))
    b.add_argument("--roots", type=int, default=64)
    b.add_argument("--seed", type=int, default=1, help="root selection seed")
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--alpha", type=float, default=14.0)
    b.add_argument("--beta", type=float, default=24.0)
    b.add_argument("--no-validate", action="store_true")
    b.add_argument("--out", help="write the report as JSON")
    b.add_argument("--tree-out", help="write the first root's BFS tree (binary .ett)")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="check a BFS tree file against a graph")
    v.add_argument("graph")
    v.add_argument("tree")
    v.add_argument("--out", help="write the report as JSON")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (ConfigError, GraphError, ValueError, OSError) as exc:
        print(f"etbfs {args.command}: error: {exc}", file=sys.stderr)
        return 2
