"""Strong scaling of one kernel over worker counts.

numba sizes its pool at import, so this re-launches itself per worker count
with NUMBA_NUM_THREADS set.

    python scripts/thread_scaling.py --scale 20 --kernel et-bfs --workers 1 2 4 8
"""

import argparse
import json
import os
import subprocess
import sys


def measure(args, k):
    from etbfs.bench import BenchConfig, run_benchmark
    from etbfs.kronecker import KroneckerParams

    cfg = BenchConfig(kernel=args.kernel, roots=args.roots, threads=k, mh=args.mh)
    r = run_benchmark(KroneckerParams(args.scale, seed=args.seed), cfg)
    return {"workers": k, "gteps": r.mean_gteps, "valid": r.all_valid}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=18)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--roots", type=int, default=16)
    ap.add_argument("--kernel", default="hybrid")
    ap.add_argument("--mh", type=int, default=0)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--child", type=int, help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        print(json.dumps(measure(args, args.child)))
        return
    rows = []
    for k in args.workers:
        env = {**os.environ, "NUMBA_NUM_THREADS": str(max(k, 1))}
        out = subprocess.run([sys.executable, __file__, *sys.argv[1:], "--child", str(k)],
                             capture_output=True, text=True, env=env, check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    base = rows[0]["gteps"]
    print(f"{'workers':>8} {'GTEPS':>8} {'speedup':>8} {'efficiency':>10} valid")
    for row in rows:
        s = row["gteps"] / base
        print(f"{row['workers']:>8} {row['gteps']:>8.4f} {s:>8.2f} {s / row['workers'] * rows[0]['workers']:>10.2f} "
              f"{row['valid']}")


if __name__ == "__main__":
    main()
