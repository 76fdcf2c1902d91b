# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernels; see _kernels_py for the layout contract."""

from libc.math cimport INFINITY, log1p, pow
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _component_draw(double u, int fam, double p1, double p2) noexcept nogil:
    if fam == 0:
        if p1 <= 0.0:
            return INFINITY
        return -log1p(-u) / p1
    return p2 * pow(-log1p(-u), 1.0 / p1)


cdef inline Py_ssize_t _cell_index(double u, const double[::1] cum_weights) noexcept nogil:
    cdef Py_ssize_t c = 0
    cdef Py_ssize_t last = cum_weights.shape[0] - 1
    while c < last and u > cum_weights[c]:
        c += 1
    return c


cdef inline double _one_draw(const double* row, const double[::1] cum_weights,
                             const int[:, ::1] families,
                             const double[:, ::1] params) noexcept nogil:
    cdef Py_ssize_t c = _cell_index(row[0], cum_weights)
    cdef double enroll = params[c, 0] * (1.0 - pow(1.0 - row[1], 1.0 / params[c, 1]))
    cdef double event = _component_draw(row[2], families[c, 0], params[c, 2], params[c, 3])
    cdef double dropout = _component_draw(row[3], families[c, 1], params[c, 4], params[c, 5])
    if event <= dropout:
        return enroll + event
    return INFINITY


cdef double _kth_smallest(double* buf, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    # Hoare quickselect; exact selection, so the value matches any other
    # correct order-statistic algorithm bit for bit.
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j
    cdef double pivot, tmp
    while lo < hi:
        pivot = buf[k]
        i = lo
        j = hi
        while True:
            while buf[i] < pivot:
                i += 1
            while pivot < buf[j]:
                j -= 1
            if i <= j:
                tmp = buf[i]
                buf[i] = buf[j]
                buf[j] = tmp
                i += 1
                j -= 1
            if i > j:
                break
        if j < k:
            lo = i
        if k < i:
            hi = j
    return buf[k]


def mixture_draws(u, const double[::1] cum_weights, const int[:, ::1] families,
                  const double[:, ::1] params):
    """Transform uniforms (m, 4) into m observed-event times (+inf = never)."""
    cdef const double[:, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = uv.shape[0], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(m):
            ov[i] = _one_draw(&uv[i, 0], cum_weights, families, params)
    return out


def dth_event_times(u, const double[::1] cum_weights, const int[:, ::1] families,
                    const double[:, ::1] params, Py_ssize_t d):
    """d-th order statistic of n patient times per replicate; u is (reps, n, 4)."""
    cdef const double[:, :, ::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t reps = uv.shape[0], n = uv.shape[1], r, j
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for r in range(reps):
                for j in range(n):
                    buf[j] = _one_draw(&uv[r, j, 0], cum_weights, families, params)
                ov[r] = _kth_smallest(buf, n, d - 1)
    finally:
        free(buf)
    return out
