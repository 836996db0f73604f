# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels.

Keeps the exact evaluation order of the numpy fallback (squares accumulated
coordinate by coordinate; identical comparison predicates) and is built with
floating point contraction disabled, so both backends count identically.
"""

from libc.math cimport sqrt


def count_covered(const double[:, ::1] q, const double[:, ::1] offsets,
                  const double[::1] norms, double r):
    """Number of rows of q within distance r of some row of offsets.

    offsets must be sorted by ascending norm (norms[j] = |offsets[j]|).
    """
    cdef Py_ssize_t npts = q.shape[0]
    cdef Py_ssize_t ndim = q.shape[1]
    cdef Py_ssize_t noff = offsets.shape[0]
    cdef double r2 = r * r
    cdef Py_ssize_t i, j, t
    cdef double s, d, qn
    cdef long covered = 0

    for i in range(npts):
        s = q[i, 0] * q[i, 0]
        for t in range(1, ndim):
            s = s + q[i, t] * q[i, t]
        qn = sqrt(s)
        for j in range(noff):
            if norms[j] > qn + r:
                break
            d = q[i, 0] - offsets[j, 0]
            s = d * d
            for t in range(1, ndim):
                d = q[i, t] - offsets[j, t]
                s = s + d * d
            if s <= r2:
                covered += 1
                break
    return covered


def count_beyond_all_planes(const double[:, ::1] q,
                            const double[:, ::1] normals,
                            const double[::1] dists):
    """Number of rows of q with q . normals[j] > dists[j] for every j."""
    cdef Py_ssize_t npts = q.shape[0]
    cdef Py_ssize_t ndim = q.shape[1]
    cdef Py_ssize_t nrml = normals.shape[0]
    cdef Py_ssize_t i, j, t
    cdef double s
    cdef bint inside
    cdef long beyond = 0

    for i in range(npts):
        inside = True
        for j in range(nrml):
            s = q[i, 0] * normals[j, 0]
            for t in range(1, ndim):
                s = s + q[i, t] * normals[j, t]
            if s <= dists[j]:
                inside = False
                break
        if inside:
            beyond += 1
    return beyond
