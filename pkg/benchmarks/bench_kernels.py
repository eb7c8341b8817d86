"""Time the per-line increment kernel with numba and with the numpy fallback.

    python benchmarks/bench_kernels.py [--resolution 64] [--repeat 3]

Both backends build the same spherical profile; the script reports wall
time per backend and the largest relative difference between them.
"""

import argparse
import time
from timeit import default_timer as timer

import numpy as np

from asymsob import _kernels as kern
from asymsob.fields import builtin_field
from asymsob.quadrature import sphere_grid
from asymsob.seminorm import build_spherical_profile


def run(f, p, resolution, use_numba):
    t = timer()
    prof = build_spherical_profile(f, p, sphere_grid(f.dim, resolution), use_numba=use_numba)
    return timer() - t, prof


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=64, help="sphere nodes (n=2)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--field", default="tent_tensor", choices=["tent_tensor", "bump", "cone_inf", "quadratic_spline"])
    args = ap.parse_args()

    if not kern.HAVE_NUMBA:
        print("numba is not installed; only the numpy path can run")
        return

    f = builtin_field(args.field, 2)
    p = 2
    # warm-up compiles (or loads cached) kernels
    run(f, p, 4, True)

    timings = {}
    profiles = {}
    for name, flag in (("numba", True), ("numpy", False)):
        best = np.inf
        for _ in range(args.repeat):
            dt, prof = run(f, p, args.resolution, flag)
            best = min(best, dt)
        timings[name] = best
        profiles[name] = prof

    a, b = profiles["numba"], profiles["numpy"]
    scale = max(np.max(np.abs(b.plus)), np.max(np.abs(b.minus)), 1e-300)
    diff = max(np.max(np.abs(a.plus - b.plus)), np.max(np.abs(a.minus - b.minus))) / scale
    lines = a.budget.get("lines")
    print(f"field={args.field} p={p} directions={args.resolution} lines={lines} radial_nodes={a.rule.nodes.size + 1}")
    print(f"{'backend':<8}{'best of ' + str(args.repeat):>14}")
    for name in ("numba", "numpy"):
        print(f"{name:<8}{timings[name]:>12.3f} s")
    print(f"speed-up  {timings['numpy'] / timings['numba']:.1f}x")
    print(f"max relative difference {diff:.2e}")
    print(f"numba threads {kern.set_threads(None)}, finished {time.strftime('%H:%M:%S')}")


if __name__ == "__main__":
    main()
