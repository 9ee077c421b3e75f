"""Time each kernel under the numba and the numpy backend.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

The backend is fixed at import time, so each backend runs in its own
interpreter; the numba figures exclude the first (compiling) call.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from wspc import kernels

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)

n = 400
periods = rng.choice([60, 84, 90, 120, 126, 140, 180, 210, 252], n).astype(np.int64)
starts = (rng.integers(0, 1 << 30, n) % periods).astype(np.int64)
ones = np.ones(n, np.int64)
machine = np.zeros(n, np.int64)
distinct = np.full(n, 1_000_003, np.int64)
horizon = int(np.lcm.reduce(periods))

small = np.array([4, 6, 9, 10], np.int64)
grid = np.array(np.meshgrid(*(np.arange(p) for p in small), indexing="ij")).reshape(len(small), -1).T.copy()
subsets = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], np.int64)

counters = rng.integers(1, 40, 60).astype(np.int64)
cperiods = np.maximum(counters, rng.integers(1, 40, 60)).astype(np.int64) + 60

adj = np.triu(rng.random((256, 256)) < 0.1, 1)
adj = adj | adj.T
sampled = rng.random((64, 256)) < 0.3

seg = rng.integers(2, 200, 100).astype(np.int64)
offsets = np.concatenate([[0], np.cumsum(seg)[:-1]]).astype(np.int64)
count = np.zeros(int(seg.sum()), np.int32)
free = seg.copy()
active = np.ones(100, np.bool_)


def forbid_and_undo():
    kernels.forbid(count, free, offsets, seg, active, np.int64(120), np.int64(7), 1)
    kernels.forbid(count, free, offsets, seg, active, np.int64(120), np.int64(7), -1)


cases = {
    "occupancy (400 jobs)": lambda: kernels.occupancy(starts, periods, ones, horizon),
    "collision_matrix (400 jobs)": lambda: kernels.collision_matrix(periods, starts),
    "first_conflict (400 jobs, no conflict)": lambda: kernels.first_conflict(distinct, np.arange(n, dtype=np.int64), machine),
    "batch_max_load (2160 vectors)": lambda: kernels.batch_max_load(grid, small, 180),
    "batch_clique (2160 vectors)": lambda: kernels.batch_clique(grid, small, subsets),
    "overloaded (60 jobs)": lambda: kernels.overloaded(counters, cperiods, 400),
    "forbid + undo (100 segments)": forbid_and_undo,
    "thin_independent (64x256)": lambda: kernels.thin_independent(sampled, adj),
}
out = {}
for name, fn in cases.items():
    fn()
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    out[name] = (time.perf_counter() - t0) / repeat
print(json.dumps({"backend": kernels.BACKEND, "times": out}))
"""


def run(flag, repeat):
    env = dict(os.environ, WSPC_DISABLE_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast = run("0", args.repeat)
    slow = run("1", args.repeat)
    if fast["backend"] != "numba":
        print("numba is not importable; only the numpy backend was timed")
    print(f"{'kernel':42} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, t_np in slow["times"].items():
        t_nb = fast["times"][name]
        print(f"{name:42} {t_nb * 1e3:10.3f} {t_np * 1e3:10.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
