"""Vertex-type counts and ET-BFS GTEPS for each MH division of one Kronecker graph.

    python scripts/mh_divisions.py --scale 20 --roots 16
"""

import argparse

from etbfs.bench import BenchConfig, run_benchmark
from etbfs.graph import build_csr
from etbfs.kronecker import KroneckerParams, generate_kronecker
from etbfs.preprocess import compute_peak_height


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=18)
    ap.add_argument("--edgefactor", type=int, default=16)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--roots", type=int, default=16)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    g = build_csr(generate_kronecker(KroneckerParams(args.scale, args.edgefactor, seed=args.seed)))
    ph = compute_peak_height(g)
    print(f"scale {args.scale}: {g.vertex_count} vertices, {g.edge_count} edges, PH {ph}")
    print(f"{'MH':>4} {'pass':>6} {'CI':>9} {'CE':>9} {'TI':>9} {'TL':>9} {'VZ':>9} {'trees':>8} {'max':>6} {'GTEPS':>8}")
    for mh in range(0, ph + 1):
        for tree_pass in ("teolv", "teet") if mh == 0 else ("teet",):
            cfg = BenchConfig(kernel="et-bfs", mh=mh, tree_pass=tree_pass, roots=args.roots, threads=args.threads)
            r = run_benchmark(g, cfg)
            c, t = r.classification["counts"], r.classification["tree_sizes"]
            print(f"{mh:>4} {tree_pass:>6} {c['CI']:>9} {c['CE']:>9} {c['TI']:>9} {c['TL']:>9} {c['VZ']:>9} "
                  f"{t['count']:>8} {t['max']:>6} {r.mean_gteps:>8.4f}")


if __name__ == "__main__":
    main()
