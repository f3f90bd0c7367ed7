"""Run the same workloads at several worker counts and print digests as JSON.

Needs ``NUMBA_NUM_THREADS`` >= the largest worker count before numba is imported.
"""

import hashlib
import json
import sys

import numpy as np

from etbfs.bench import BenchConfig, run_benchmark
from etbfs.graph import build_csr
from etbfs.kernels import worker_threads
from etbfs.kronecker import KroneckerParams, generate_kronecker

CONFIGS = [
    dict(kernel="top-down"),
    dict(kernel="hybrid"),
    dict(kernel="degree-aware"),
    dict(kernel="block-search"),
    dict(kernel="et-bfs", mh=0),
    dict(kernel="et-bfs", mh=-1, tree_pass="teet"),
]


def digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def run(scale, workers):
    params = KroneckerParams(scale=scale, seed=3)
    out = {}
    for k in workers:
        with worker_threads(k):
            edges = generate_kronecker(params)
        row = {"graph": digest(edges.src, edges.dst)}
        g = build_csr(edges)
        for cfg in CONFIGS:
            report = run_benchmark(g, BenchConfig(roots=8, threads=k, keep_trees=True, **cfg))
            name = f"{cfg['kernel']}/{cfg.get('mh', 0)}"
            row[name] = {
                "levels": digest(*[r.levels() for r in report.per_root]),
                "edges": [r.traversed_edges for r in report.per_root],
                "valid": report.all_valid,
            }
        out[k] = row
    return out


if __name__ == "__main__":
    scale = int(sys.argv[1])
    workers = [int(x) for x in sys.argv[2:]]
    print(json.dumps(run(scale, workers)))
