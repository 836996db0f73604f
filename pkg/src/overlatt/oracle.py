"""Monte Carlo estimators for union and overlap volumes.

Sampling is split into fixed-size chunks of 2**20 draws.  Chunk i uses the
Philox stream jumped(i) from the seed, and chunk results are integer counts,
so estimates are bit-identical for a given (seed, samples) no matter how the
chunks are scheduled across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from . import _kernels
from .lattice import DistortedLattice, coverage_offsets, unit_ball_volume

CHUNK = 1 << 20

DEFAULT_SAMPLES_CI = 1_000_000
DEFAULT_SAMPLES_RELEASE = 10_000_000


class McEstimate(NamedTuple):
    """A Monte Carlo estimate with its standard error and the
    sampling parameters that produced it."""

    mean: float
    std_error: float
    samples: int
    seed: int


def resolve_threads(par: int | None) -> int:
    """Thread count: explicit argument, else OVERLATT_THREADS, else 1."""
    if par is not None:
        if par < 1:
            raise ValueError(f"thread count must be >= 1, got {par}")
        return par
    env = os.environ.get("OVERLATT_THREADS", "").strip()
    if env:
        try:
            val = int(env)
        except ValueError:
            raise ValueError(f"OVERLATT_THREADS must be an integer, got {env!r}")
        if val < 1:
            raise ValueError(f"OVERLATT_THREADS must be >= 1, got {val}")
        return val
    return 1


def _chunk_sizes(samples: int):
    full, rem = divmod(samples, CHUNK)
    sizes = [CHUNK] * full
    if rem:
        sizes.append(rem)
    return sizes


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def _run_chunks(worker, samples: int, seed: int, par: int | None):
    """Sum integer results of worker(rng, size) over the chunk grid."""
    sizes = _chunk_sizes(samples)
    jobs = [(i, size) for i, size in enumerate(sizes)]
    threads = resolve_threads(par)

    def one(job):
        i, size = job
        return worker(_chunk_rng(seed, i), size)

    if threads == 1 or len(jobs) == 1:
        results = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, jobs))
    totals = results[0]
    if isinstance(totals, tuple):
        for extra in results[1:]:
            totals = tuple(a + b for a, b in zip(totals, extra))
        return totals
    return sum(results)


def _binomial_se(p: float, n: int) -> float:
    if n < 2 or p <= 0.0 or p >= 1.0:
        return 0.0
    return math.sqrt(p * (1.0 - p) / (n - 1))


def _validate_mc_args(r: float, samples: int):
    if not (r >= 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be finite and >= 0, got {r}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")


def mc_union(lat: DistortedLattice, r: float, samples: int = DEFAULT_SAMPLES_CI,
             seed: int = 0, par: int | None = None) -> McEstimate:
    """Estimate the covered volume fraction of the fundamental cell.

    Points are drawn uniformly from the cell B * [-1/2, 1/2)^n; the covered
    fraction equals vol(ball_r intersect Voronoi cell) / delta because the
    ball union is lattice-periodic.
    """
    _validate_mc_args(r, samples)
    vecs, norms = coverage_offsets(lat)
    basis_t = lat.basis.T.copy()
    n = lat.n

    def worker(rng, size):
        u = rng.random((size, n))
        frac = u - np.rint(u)
        q = np.ascontiguousarray(frac @ basis_t)
        return _kernels.count_covered(q, vecs, norms, r)

    covered = _run_chunks(worker, samples, seed, par)
    p = covered / samples
    return McEstimate(p, _binomial_se(p, samples), samples, seed)


def mc_vol_overlap(lat: DistortedLattice, r: float,
                   samples: int = DEFAULT_SAMPLES_CI, seed: int = 0,
                   par: int | None = None) -> McEstimate:
    """Estimate density minus covered fraction (the volume lost to overlap).

    Density is exact (unit_ball_volume(n) * r^n / delta), so the standard
    error is the union estimate's.
    """
    est = mc_union(lat, r, samples=samples, seed=seed, par=par)
    density = unit_ball_volume(lat.n) * r ** lat.n / lat.delta
    return McEstimate(density - est.mean, est.std_error, samples, seed)


def mc_volume_region(r: float, planes, samples: int = DEFAULT_SAMPLES_CI,
                     seed: int = 0, par: int | None = None) -> McEstimate:
    """Estimate vol({x : |x| <= r and x . n_j > d_j for every plane}).

    planes is a nonempty sequence of (normal, distance) pairs; the region is
    the part of the ball beyond all of them, which is how cap pair and cap
    triple intersections are cross-checked.  Rejection from the cube
    [-r, r]^n; the estimate conditions on landing in the ball, scaling the
    exact ball volume by the conditional hit fraction.  `samples` counts
    requested cube draws, not ball hits.
    """
    _validate_mc_args(r, samples)
    plist = list(planes)
    if not plist:
        raise ValueError("at least one plane is required")
    normals = np.ascontiguousarray([np.asarray(nrm, dtype=float)
                                    for nrm, _ in plist])
    dists = np.ascontiguousarray([float(d) for _, d in plist])
    if normals.ndim != 2:
        raise ValueError("plane normals must share one dimension")
    n = normals.shape[1]
    r2 = r * r

    def worker(rng, size):
        u = rng.random((size, n))
        x = (2.0 * u - 1.0) * r
        s = x[:, 0] * x[:, 0]
        for t in range(1, n):
            s = s + x[:, t] * x[:, t]
        inside = s <= r2
        xin = np.ascontiguousarray(x[inside])
        nin = int(inside.sum())
        if nin == 0:
            return (0, 0)
        return (_kernels.count_beyond_all_planes(xin, normals, dists), nin)

    beyond, nin = _run_chunks(worker, samples, seed, par)
    if nin == 0:
        raise RuntimeError("no sample landed inside the ball; "
                           "increase the sample budget")
    vball = unit_ball_volume(n) * r ** n
    p = beyond / nin
    return McEstimate(vball * p, vball * _binomial_se(p, nin), samples, seed)
