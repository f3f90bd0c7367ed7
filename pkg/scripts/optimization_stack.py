"""GTEPS as optimizations are stacked onto the hybrid kernel.

    python scripts/optimization_stack.py --scale 20 --roots 16 --json stack.json
"""

import argparse
import json

from etbfs.bench import BenchConfig, gteps_ratio, run_benchmark
from etbfs.graph import build_csr
from etbfs.kronecker import KroneckerParams, generate_kronecker

STACK = [
    ("top-down", "top-down", ()),
    ("hybrid", "hybrid", ()),
    ("+rm-zero", "hybrid", ("rm-zero",)),
    ("+round-robin", "hybrid", ("rm-zero", "round-robin")),
    ("+degree-aware", "degree-aware", ("rm-zero", "round-robin")),
    ("+block-search", "block-search", ("rm-zero", "round-robin")),
    ("+et", "et-bfs", ("rm-zero", "round-robin", "block-search")),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=18)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--roots", type=int, default=16)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--mh", type=int, default=0)
    ap.add_argument("--json", help="write all reports here")
    args = ap.parse_args()

    g = build_csr(generate_kronecker(KroneckerParams(args.scale, seed=args.seed)))
    reports = {}
    base = None
    print(f"{'step':<16} {'GTEPS':>8} {'vs hybrid':>10} {'prep s':>8}")
    for name, kernel, opts in STACK:
        cfg = BenchConfig(kernel=kernel, optimizations=opts, roots=args.roots, threads=args.threads, mh=args.mh)
        r = run_benchmark(g, cfg)
        reports[name] = r.to_dict()
        if kernel == "hybrid" and base is None:
            base = r
        ratio = gteps_ratio(r, base) if base else float("nan")
        print(f"{name:<16} {r.mean_gteps:>8.4f} {ratio:>10.2f} {r.preprocessing_seconds:>8.2f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2)


if __name__ == "__main__":
    main()
