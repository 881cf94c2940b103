"""Compare the compiled and pure-Python prox kernels.

Times the two hot kernels in isolation and a full ``prox`` call with each
backend swapped in, then reports the speedup.

    python benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import time

import numpy as np

from sqprox import kernels
from sqprox.objectives import catalog_entry
from sqprox.prox import ProxParams, prox


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(rng, grid_points):
    P2 = np.ascontiguousarray(rng.normal(size=(grid_points, 2)))
    x2, c2 = np.array([1.0, -0.5]), np.zeros(2)
    H = catalog_entry("quadratic-h2").space
    PH = np.ascontiguousarray(H.sample(rng, grid_points))
    xh, ch = H.take(PH, 0), H.origin()
    sq = kernels.PROFILES["sqrtnorm"]
    quad = kernels.PROFILES["quadratic"]
    p, q = np.array([2.0, 1.0]), np.array([-1.0, -0.3])
    return [
        ("composite_grid euclid", lambda k: k.composite_grid(kernels.EUCLID, P2, x2, c2, sq, 1.0, 1.0, 0.5)),
        ("composite_grid hyper", lambda k: k.composite_grid(kernels.HYPER, PH, xh, ch, quad, 0.5, 1.0, 0.5)),
        ("golden_segment euclid x200",
         lambda k: [k.golden_segment(kernels.EUCLID, p, q, x2, c2, sq, 1.0, 1.0, 0.5, 60) for _ in range(200)]),
        ("golden_segment hyper x200",
         lambda k: [k.golden_segment(kernels.HYPER, xh, ch, xh, ch, quad, 0.5, 1.0, 0.5, 60) for _ in range(200)]),
    ]


def prox_case(name, calls):
    e = catalog_entry(name)
    rng = np.random.default_rng(0)
    X = e.space.sample(rng, calls)
    params = ProxParams()

    def run(k):
        saved = kernels.composite_grid, kernels.golden_segment
        kernels.composite_grid, kernels.golden_segment = k.composite_grid, k.golden_segment
        try:
            for i in range(calls):
                prox(e.space, e.objective, params, e.space.take(X, i))
        finally:
            kernels.composite_grid, kernels.golden_segment = saved

    return f"prox {name} x{calls}", run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats, best is reported")
    ap.add_argument("--grid-points", type=int, default=20_000)
    ap.add_argument("--prox-calls", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the python backend is timed")
    rng = np.random.default_rng(args.seed)
    cases = kernel_cases(rng, args.grid_points)
    cases += [prox_case(n, args.prox_calls) for n in ("sqrtnorm-e2", "quadratic-h2")]

    names = sorted(backends)
    print(f"{'case':<34}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in cases:
        times = {n: best_time(lambda: fn(backends[n]), args.repeat) for n in names}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<34}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
