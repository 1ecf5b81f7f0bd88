"""Time boosted-tree fitting with the numba kernels against the numpy fallback.

Each backend runs in its own interpreter because ``CLIMRISK_NO_NUMBA`` is
read at import time. The first fit is a warm-up (numba compilation or cache
load) and is reported separately.

    python3 benchmarks/bench_gbt.py --rows 58 --features 4 --trees 500 --repeat 5
"""
import argparse
import json
import os
import subprocess
import sys

_CHILD = """
import json, sys, time
import numpy as np
from climrisk import BACKEND
from climrisk.models import fit_gbt, predict_gbt
rows, feats, trees, repeat, growth = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4]), sys.argv[5]
r = np.random.default_rng(0)
X = r.normal(size=(rows, feats))
y = np.sin(X[:, 0]) + X[:, 1] ** 2 + r.normal(0, 0.3, rows)
t0 = time.perf_counter()
fit_gbt(X, y, 5, 2, 0.01, growth)
warm = time.perf_counter() - t0
times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    ens = fit_gbt(X, y, trees, 2, 0.01, growth)
    times.append(time.perf_counter() - t0)
pred = predict_gbt(ens, X)
print(json.dumps({"backend": BACKEND, "warmup": warm, "best": min(times), "median": float(np.median(times)),
                  "checksum": pred.tobytes().hex()}))
"""


def run_backend(no_numba: bool, args) -> dict:
    env = dict(os.environ)
    env.pop("CLIMRISK_NO_NUMBA", None)
    if no_numba:
        env["CLIMRISK_NO_NUMBA"] = "1"
    cmd = [sys.executable, "-c", _CHILD, str(args.rows), str(args.features), str(args.trees), str(args.repeat),
           args.growth]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=58)
    ap.add_argument("--features", type=int, default=4)
    ap.add_argument("--trees", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--growth", choices=("levelwise", "leafwise"), default="levelwise")
    args = ap.parse_args(argv)

    fast = run_backend(False, args)
    slow = run_backend(True, args)
    print(f"fit_gbt: {args.rows} rows x {args.features} features, {args.trees} trees, {args.growth}")
    for res in (fast, slow):
        print(f"  {res['backend']:>5}: best {res['best']:.4f}s  median {res['median']:.4f}s  "
              f"(warm-up {res['warmup']:.2f}s)")
    if fast["backend"] == "numba":
        print(f"  speed-up: {slow['best'] / fast['best']:.1f}x")
    print(f"  identical predictions: {fast['checksum'] == slow['checksum']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
