"""Time the compiled kernels against the pure-Python fallback.

    python bench/benchmark.py [--repeat N]
"""

import argparse
import math
import random
import timeit

from hypvol._backend import compiled_kernels, python_kernels
from hypvol.caps import perp_geometry
from hypvol.numerics import DEFAULT_TOLERANCES


def sample_geometries(n, seed=1):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        R = rng.uniform(0.3, 1.5)
        w = rng.uniform(0.02, 0.95) * R
        alpha = rng.uniform(0.5 * math.pi + 0.01, math.pi - 0.01)
        g = perp_geometry(R, w, alpha)
        if not g.disjoint and g.theta0 > 0:
            out.append(g)
    return out


def kappa_args(n, seed=2):
    rng = random.Random(seed)
    args = []
    for _ in range(n):
        R = rng.uniform(0.1, 2.0)
        args.append((R, rng.uniform(0.01, 0.99) * R))
    return args


def run(kernels, geoms, kargs):
    tol = DEFAULT_TOLERANCES
    for g in geoms:
        kernels.perp_integral(g.R, g.m, g.c, g.v, g.rho, g.mu, g.theta0, tol.quad_abs, tol.quad_rel)
    for R, w in kargs:
        kernels.kappa(R, w)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("-n", type=int, default=500, help="integrals per run")
    args = parser.parse_args()

    geoms = sample_geometries(args.n)
    kargs = kappa_args(20 * args.n)
    backends = [("python", python_kernels)]
    if compiled_kernels is not None:
        backends.append(("cython", compiled_kernels))
    else:
        print("compiled kernels not built; timing the fallback only")

    times = {}
    for name, k in backends:
        times[name] = min(timeit.repeat(lambda: run(k, geoms, kargs), number=1, repeat=args.repeat))
        print(f"{name:>7}: {times[name]:.4f} s  ({args.n} iota integrals, {len(kargs)} cap volumes)")
    if len(times) == 2:
        print(f"speedup: {times['python'] / times['cython']:.1f}x")


if __name__ == "__main__":
    main()
