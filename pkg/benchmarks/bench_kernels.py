"""Time the numba and numpy kernel routes on workloads sized like an imaging run.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--nodes 40401]

The first numba call per kernel is timed separately (compilation or cache
load); the table reports the best of ``--repeat`` warm runs.
"""

import argparse
import math
import time

import numpy as np

from mwmusic.kernels import get_backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(nodes, rng):
    # Distances and angles as in a 201 x 201 map over a 0.2 m square, k ~ 113.
    x = rng.uniform(0.0, 35.0, nodes)
    z = rng.uniform(0.5, 25.0, nodes * 4) * (1.0 + 0.07j)
    phi = rng.uniform(-math.pi, math.pi, nodes)
    thetas = 1.5 * math.pi - 2.0 * math.pi * np.arange(16) / 16
    nu_max = int(math.ceil(35 + 10 * 35 ** (1 / 3))) + 12
    table = get_backend("numpy").bessel_j_table(nu_max, x)
    return {
        "bessel_j_table": lambda be: be.bessel_j_table(nu_max, x),
        "bessel_y01": lambda be: be.bessel_y01(x + 0.1),
        "hankel1_0": lambda be: be.hankel1_0(z),
        "residual_sums": lambda be: be.residual_sums(table, phi, thetas),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=201 * 201)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    jobs = workloads(args.nodes, rng)
    numpy_be, numba_be = get_backend("numpy"), get_backend("numba")
    print(f"{'kernel':<16}{'numpy s':>10}{'numba s':>10}{'speedup':>9}{'first numba call s':>20}")
    for name, job in jobs.items():
        t0 = time.perf_counter()
        job(numba_be)
        first = time.perf_counter() - t0
        t_np = best_of(lambda: job(numpy_be), args.repeat)
        t_nb = best_of(lambda: job(numba_be), args.repeat)
        print(f"{name:<16}{t_np:>10.4f}{t_nb:>10.4f}{t_np / t_nb:>9.2f}{first:>20.3f}")


if __name__ == "__main__":
    main()
