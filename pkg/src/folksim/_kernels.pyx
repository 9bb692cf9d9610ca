# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled sparse x dense product used by the propagation iterations.

Rows of the output are distributed over OpenMP threads; every output row is
accumulated by a single thread in CSR order, so results do not depend on the
thread count.
"""

import numpy as np
from cython.parallel import prange


def csr_dense_matmul(
    const long long[::1] indptr,
    const long long[::1] indices,
    const double[::1] data,
    const double[:, ::1] dense,
    int num_threads=1,
):
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1
    cdef Py_ssize_t m = dense.shape[1]
    cdef Py_ssize_t i, j, k
    cdef long long p
    cdef double v
    out = np.zeros((n_rows, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    if num_threads < 1:
        num_threads = 1
    for i in prange(n_rows, nogil=True, num_threads=num_threads, schedule="static"):
        for p in range(indptr[i], indptr[i + 1]):
            v = data[p]
            k = indices[p]
            for j in range(m):
                o[i, j] = o[i, j] + v * dense[k, j]
    return out
