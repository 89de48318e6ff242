"""Compiled implementations of the hot kernels.

Same contracts as _pykernels: float64 in, float64 out, rows are vectors.
Inputs are coerced to C-contiguous float64 on entry, so callers may pass
anything array-like.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef void _dot_scores(const double[:, ::1] matrix, const double[::1] query,
                      double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += matrix[i, j] * query[j]
        out[i] = acc


cdef void _dot_matrix(const double[:, ::1] a, const double[:, ::1] b,
                      double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for k in range(d):
                acc += a[i, k] * b[j, k]
            out[i, j] = acc


cdef void _sqdist_matrix(const double[:, ::1] x, const double[:, ::1] centers,
                         double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k = centers.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double acc, diff
    for i in range(n):
        for j in range(k):
            acc = 0.0
            for c in range(d):
                diff = x[i, c] - centers[j, c]
                acc += diff * diff
            out[i, j] = acc


def dot_scores(matrix, query):
    """Row-wise dot products of `matrix` against `query`."""
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    q = np.ascontiguousarray(query, dtype=np.float64)
    out = np.empty(m.shape[0], dtype=np.float64)
    if m.shape[0]:
        _dot_scores(m, q, out)
    return out


def dot_matrix(a, b):
    """All pairwise dot products: result[i, j] = a[i] . b[j]."""
    aa = np.ascontiguousarray(a, dtype=np.float64)
    bb = np.ascontiguousarray(b, dtype=np.float64)
    out = np.empty((aa.shape[0], bb.shape[0]), dtype=np.float64)
    if aa.shape[0] and bb.shape[0]:
        _dot_matrix(aa, bb, out)
    return out


def sqdist_matrix(x, centers):
    """Squared Euclidean distances: result[i, j] = ||x[i] - centers[j]||^2.

    Differences are taken before squaring (no expanded identity), matching
    the fallback's resistance to cancellation on near-coincident points.
    """
    xx = np.ascontiguousarray(x, dtype=np.float64)
    cc = np.ascontiguousarray(centers, dtype=np.float64)
    out = np.empty((xx.shape[0], cc.shape[0]), dtype=np.float64)
    if xx.shape[0] and cc.shape[0]:
        _sqdist_matrix(xx, cc, out)
    return out
