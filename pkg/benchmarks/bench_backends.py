"""Compare the compiled kernels with the pure-Python/numpy fallback.

    python benchmarks/bench_backends.py [--repeat 5] [--n 100000]

Prints one line per kernel with the best-of-N time for each backend and the
speedup. The end-to-end row runs sample + census with the backend swapped in.
"""

import argparse
import time

import numpy as np

from hyperstar import collisions, hypergraph, sampler
from hyperstar._accel import BACKENDS
from hyperstar.sampler import LogPlusC, SampleConfig, binom, binomial_table, make_rng


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def use_backend(impl):
    for module in (collisions, hypergraph, sampler):
        module.kernels = impl


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=100_000)
    args = ap.parse_args()
    if "compiled" not in BACKENDS:
        raise SystemExit("compiled extension not built; run pip install -e . first")

    n, k = args.n, 3
    H = sampler.sample(SampleConfig(n, k, 1), LogPlusC(0.0))
    table = binomial_table(n, k)
    ranks = np.sort(make_rng(2).integers(0, binom(n, k), H.m, dtype=np.int64)).astype(np.uint64)
    indptr, indices = H._csr
    A = make_rng(3).normal(size=(120, 120))
    A = A + A.T

    cases = {
        f"unrank_colex ({H.m} ranks)": lambda b: b.unrank_colex(ranks, table, k),
        f"build_stars (n={n})": lambda b: b.build_stars(H.edges, n),
        f"unit_representatives (n={n})": lambda b: b.unit_representatives(H.edges, indptr,
                                                                           indices),
        "jacobi_eigenvalues (120x120)": lambda b: b.jacobi_eigenvalues(A.copy(), 1e-12, 100),
    }
    print(f"{'kernel':40s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        tc = best_of(lambda: fn(BACKENDS["compiled"]), args.repeat)
        tp = best_of(lambda: fn(BACKENDS["python"]), args.repeat)
        print(f"{name:40s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms {tp / tc:7.1f}x")

    def end_to_end(seed=[0]):
        seed[0] += 1
        collisions.census(sampler.sample(SampleConfig(n, k, seed[0]), LogPlusC(0.0)))

    active = sampler.kernels
    timings = {}
    for name in ("compiled", "python"):
        use_backend(BACKENDS[name])
        timings[name] = best_of(end_to_end, args.repeat)
    use_backend(active)
    tc, tp = timings["compiled"], timings["python"]
    print(f"{'sample + census (log+c=0)':40s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms "
          f"{tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
