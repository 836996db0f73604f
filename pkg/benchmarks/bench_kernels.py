"""Compare the Cython and numpy counting kernels on identical inputs.

Both backends must return bit-identical counts; this script verifies
that and reports throughput (samples per second) plus the speedup of
the compiled kernel over the fallback.

    python3 benchmarks/bench_kernels.py --samples 2000000 --dim 3 \
        --delta 0.8 --r 0.6 --seed 0
"""

import argparse
import time

import numpy as np

from overlatt._kernels import _mc_np
from overlatt.lattice import DistortedLattice, coverage_offsets


def _draw_points(lat: DistortedLattice, samples: int,
                 seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((samples, lat.n))
    frac = u - np.rint(u)
    return np.ascontiguousarray(frac @ lat.basis.T)


def _time_backend(fn, points, vecs, norms, r, repeats: int):
    best = float("inf")
    count = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        count = fn(points, vecs, norms, r)
        best = min(best, time.perf_counter() - t0)
    return count, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--delta", type=float, default=0.8)
    parser.add_argument("--r", type=float, default=0.6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        from overlatt._kernels import _mc_cy
    except ImportError:
        print("compiled kernel not built; run "
              "`python3 setup.py build_ext --inplace` first")
        return 1

    lat = DistortedLattice(args.dim, args.delta)
    vecs, norms = coverage_offsets(lat)
    points = _draw_points(lat, args.samples, args.seed)

    count_np, t_np = _time_backend(_mc_np.count_covered, points, vecs,
                                   norms, args.r, args.repeats)
    count_cy, t_cy = _time_backend(_mc_cy.count_covered, points, vecs,
                                   norms, args.r, args.repeats)

    if count_np != count_cy:
        print(f"MISMATCH: numpy={count_np} cython={count_cy}")
        return 1

    rate_np = args.samples / t_np
    rate_cy = args.samples / t_cy
    print(f"dim={args.dim} delta={args.delta} r={args.r} "
          f"samples={args.samples} covered={count_np}")
    print(f"numpy : {t_np:8.3f}s  {rate_np / 1e6:8.2f} Msamples/s")
    print(f"cython: {t_cy:8.3f}s  {rate_cy / 1e6:8.2f} Msamples/s")
    print(f"speedup: {t_np / t_cy:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
