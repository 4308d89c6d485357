#!/usr/bin/env python3
"""Time the coverage kernels under numba and plain numpy.

Part 1 calls both kernel sets directly on the bundled 50-node scenario
(400x400 grid, 2 km disks). Part 2 runs a full local search once per
backend in a fresh interpreter, since the backend is fixed at import.

    python3 benchmarks/bench_kernels.py [--repeat 20] [--lam 0.1]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from covcomp import kernels
from covcomp.coverage import grid_points
from covcomp.scenario import bundled_scenario_path, load_scenario


def timeit(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(ks, points, centres, radius):
    n_points = len(points)
    disks = [ks["disk_indices"](points, c, radius) for c in centres]
    flat = np.concatenate(disks)
    cnt = np.zeros(n_points, dtype=np.int64)
    for d in disks:
        ks["add_disk"](cnt, d, 1)

    def add_remove():
        ks["add_disk"](cnt, disks[0], -1)
        ks["add_disk"](cnt, disks[0], 1)

    return {
        "disk_indices (50 disks)": lambda: [ks["disk_indices"](points, c, radius) for c in centres],
        "union_count": lambda: ks["union_count"](n_points, flat),
        "count_sole (50 masters)": lambda: [ks["count_sole"](cnt, d) for d in disks],
        "count_gain_after_swap": lambda: ks["count_gain_after_swap"](cnt, disks[0], disks[1]),
        "add_disk (remove+add)": add_remove,
    }


def bench_kernels(repeat):
    sc = load_scenario(bundled_scenario_path())
    points = grid_points(sc.region.bounds, sc.coverage_config.resolution_m)
    centres = sc.positions
    radius = sc.coverage_radius_D
    print(f"grid points: {len(points)}, disks: {len(centres)}, radius {radius:g} m")
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    np_cases = kernel_cases(kernels.NUMPY_KERNELS, points, centres, radius)
    nb_cases = kernel_cases(kernels.NUMBA_KERNELS, points, centres, radius)
    for name in np_cases:
        t_np = timeit(np_cases[name], repeat)
        t_nb = timeit(nb_cases[name], repeat)
        print(f"{name:28s} {t_np * 1e3:10.3f} {t_nb * 1e3:10.3f} {t_np / t_nb:8.2f}")


_SOLVE = """
import json, time
from covcomp import _jit
from covcomp.descent import DescentConfig, run_descent
from covcomp.scenario import bundled_scenario_path, load_scenario
sc = load_scenario(bundled_scenario_path())
t0 = time.perf_counter()
res = run_descent(sc, DescentConfig(lam={lam}))
dt = time.perf_counter() - t0
print(json.dumps({{"backend": _jit.backend_name(), "seconds": dt, "rate": res.evaluation.rate,
                  "coverage": res.evaluation.coverage.fraction, "masters": len(res.clustering.masters)}}))
"""


def bench_descent(lam):
    print(f"\nfull local search, lambda={lam} (fresh interpreter per backend, includes JIT load)")
    results = []
    for disable in ("0", "1"):
        env = dict(os.environ, COVCOMP_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, "-c", _SOLVE.format(lam=lam)], env=env, capture_output=True, text=True, check=True)
        r = json.loads(out.stdout.strip().splitlines()[-1])
        results.append(r)
        print(f"  {r['backend']:6s} {r['seconds']:7.3f} s  masters={r['masters']} coverage={r['coverage']:.6f} rate={r['rate']:.6f}")
    same = all((a["rate"], a["coverage"], a["masters"]) == (results[0]["rate"], results[0]["coverage"], results[0]["masters"]) for a in results)
    print(f"  identical results across backends: {same}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--lam", type=float, default=0.1)
    args = ap.parse_args()
    bench_kernels(args.repeat)
    bench_descent(args.lam)


if __name__ == "__main__":
    main()
