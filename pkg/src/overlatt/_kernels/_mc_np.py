"""numpy fallback kernels.

Mirrors the compiled extension operation for operation: squared norms are
accumulated coordinate by coordinate in index order and every comparison
uses the same predicate, so counts agree bit for bit across backends.
"""

import numpy as np


def _rowwise_sq(q: np.ndarray) -> np.ndarray:
    # fixed-order sum of squares: s = q0*q0; s += q1*q1; ...
    s = q[:, 0] * q[:, 0]
    for t in range(1, q.shape[1]):
        s = s + q[:, t] * q[:, t]
    return s


def count_covered(q: np.ndarray, offsets: np.ndarray, norms: np.ndarray,
                  r: float) -> int:
    """Number of rows of q within distance r of some row of offsets.

    offsets must be sorted by ascending norm (norms[j] = |offsets[j]|).
    A point q with |q| > norms[j] + r cannot be covered by offset j or any
    later one, which gives the early exit.
    """
    q = np.asarray(q, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    norms = np.asarray(norms, dtype=np.float64)
    n = q.shape[1]
    r2 = r * r
    qnorm = np.sqrt(_rowwise_sq(q))
    covered = 0
    alive = np.arange(q.shape[0])
    qa = qnorm
    for j in range(offsets.shape[0]):
        if alive.size == 0:
            break
        reachable = norms[j] <= qa + r
        if not reachable.any():
            # norm-sorted offsets: nothing later reaches these points either
            break
        # points out of reach now stay out of reach; retire them as uncovered
        sub = np.nonzero(reachable)[0]
        idx = alive[sub]
        d = q[idx, 0] - offsets[j, 0]
        s = d * d
        for t in range(1, n):
            d = q[idx, t] - offsets[j, t]
            s = s + d * d
        hit = s <= r2
        covered += int(hit.sum())
        alive = idx[~hit]
        qa = qa[sub[~hit]]
    return covered


def count_beyond_all_planes(q: np.ndarray, normals: np.ndarray,
                            dists: np.ndarray) -> int:
    """Number of rows of q with q . normals[j] > dists[j] for every j."""
    q = np.asarray(q, dtype=np.float64)
    normals = np.asarray(normals, dtype=np.float64)
    dists = np.asarray(dists, dtype=np.float64)
    n = q.shape[1]
    alive = np.arange(q.shape[0])
    for j in range(normals.shape[0]):
        if alive.size == 0:
            break
        s = q[alive, 0] * normals[j, 0]
        for t in range(1, n):
            s = s + q[alive, t] * normals[j, t]
        alive = alive[s > dists[j]]
    return int(alive.size)
