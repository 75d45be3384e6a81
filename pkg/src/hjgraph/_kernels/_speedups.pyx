# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: explicit upwind stepping and generalized Dijkstra.

Mirrors ``fallback.py`` operation for operation; the arithmetic must stay
bit-compatible (the extension is built with -ffp-contract=off for that
reason).
"""

from libc.math cimport isfinite, pow

import numpy as np

cimport numpy as cnp

cnp.import_array()

# Hamiltonian family codes shared with hamiltonian.kernel_pack().
DEF FAMILY_AFFINE = 0
DEF FAMILY_POWER = 1
DEF FAMILY_TABULATED = 2

# Error codes returned by run_upwind_steps.
DEF ERR_NONE = 0
DEF ERR_NONFINITE = 1
DEF ERR_TABLE_RANGE = 2


cdef inline double _ham_value(int family, double p, double a, double f,
                              double k, const double[::1] grid,
                              const double[:, ::1] tab, Py_ssize_t row,
                              Py_ssize_t m) noexcept nogil:
    # p >= 0 is guaranteed by the caller (descent slopes are nonnegative).
    cdef Py_ssize_t lo, hi, mid
    cdef double g0, g1, v0, v1
    if family == FAMILY_AFFINE:
        return a * p + f
    if family == FAMILY_POWER:
        return pow(p, k) + f
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if grid[mid] <= p:
            lo = mid
        else:
            hi = mid
    g0 = grid[lo]
    g1 = grid[hi]
    v0 = tab[row, lo]
    v1 = tab[row, hi]
    return v0 + (v1 - v0) * ((p - g0) / (g1 - g0))


def run_upwind_steps(const double[::1] values, int n_steps, double dt,
                     const int[::1] indptr, const int[::1] indices,
                     const double[::1] inv_len, int family,
                     const double[::1] coef_a, const double[::1] pot_f,
                     double power_k, const double[::1] p_grid,
                     const double[:, ::1] tab, double p_domain_max):
    """Advance u' = u - dt*H(x, D-u); returns (values, err_code, err_vertex)."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = p_grid.shape[0]
    cdef cnp.ndarray[double, ndim=1] buf0 = np.array(values, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] buf1 = np.empty(n, dtype=np.float64)
    cdef double* cur = <double*> cnp.PyArray_DATA(buf0)
    cdef double* nxt = <double*> cnp.PyArray_DATA(buf1)
    cdef double* tmp
    cdef Py_ssize_t step, x, a
    cdef double slope, d, val
    cdef int err_code = ERR_NONE
    cdef Py_ssize_t err_vertex = -1
    cdef bint table_bounded = isfinite(p_domain_max)
    cdef bint cur_is_first = True

    with nogil:
        for step in range(n_steps):
            for x in range(n):
                slope = 0.0
                for a in range(indptr[x], indptr[x + 1]):
                    d = (cur[x] - cur[indices[a]]) * inv_len[a]
                    if d > slope:
                        slope = d
                if table_bounded and slope > p_domain_max:
                    err_code = ERR_TABLE_RANGE
                    err_vertex = x
                    break
                val = cur[x] - dt * _ham_value(family, slope, coef_a[x],
                                               pot_f[x], power_k, p_grid,
                                               tab, x, m)
                if not isfinite(val):
                    err_code = ERR_NONFINITE
                    err_vertex = x
                    break
                nxt[x] = val
            if err_code != ERR_NONE:
                break
            tmp = cur
            cur = nxt
            nxt = tmp
            cur_is_first = not cur_is_first

    if cur_is_first:
        return buf0, err_code, err_vertex
    return buf1, err_code, err_vertex


cdef inline bint _heap_less(double da, int va, double db, int vb) noexcept nogil:
    return da < db or (da == db and va < vb)


def dijkstra(int n, const int[::1] indptr, const int[::1] indices,
             const double[::1] costs, const int[::1] sources,
             const double[::1] source_values):
    """Multi-source Dijkstra; ties settle lowest vertex index first."""
    cdef cnp.ndarray[double, ndim=1] dist_arr = np.full(n, np.inf)
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t cap = costs.shape[0] + sources.shape[0] + 1
    cdef cnp.ndarray[double, ndim=1] hd_arr = np.empty(cap, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] hv_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] hd = hd_arr
    cdef int[::1] hv = hv_arr
    cdef cnp.uint8_t[::1] done = done_arr
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t i, j, child, a
    cdef int x, y
    cdef double d, nd, td
    cdef int tv

    with nogil:
        for i in range(sources.shape[0]):
            x = sources[i]
            d = source_values[i]
            if d < dist[x]:
                dist[x] = d
                # sift up
                j = size
                hd[j] = d
                hv[j] = x
                size += 1
                while j > 0 and _heap_less(hd[j], hv[j], hd[(j - 1) >> 1],
                                           hv[(j - 1) >> 1]):
                    td = hd[j]; tv = hv[j]
                    hd[j] = hd[(j - 1) >> 1]; hv[j] = hv[(j - 1) >> 1]
                    hd[(j - 1) >> 1] = td; hv[(j - 1) >> 1] = tv
                    j = (j - 1) >> 1

        while size > 0:
            d = hd[0]
            x = hv[0]
            size -= 1
            hd[0] = hd[size]
            hv[0] = hv[size]
            # sift down
            j = 0
            while True:
                child = 2 * j + 1
                if child >= size:
                    break
                if child + 1 < size and _heap_less(hd[child + 1], hv[child + 1],
                                                   hd[child], hv[child]):
                    child += 1
                if _heap_less(hd[child], hv[child], hd[j], hv[j]):
                    td = hd[j]; tv = hv[j]
                    hd[j] = hd[child]; hv[j] = hv[child]
                    hd[child] = td; hv[child] = tv
                    j = child
                else:
                    break
            if done[x]:
                continue
            done[x] = 1
            for a in range(indptr[x], indptr[x + 1]):
                y = indices[a]
                nd = d + costs[a]
                if nd < dist[y]:
                    dist[y] = nd
                    j = size
                    hd[j] = nd
                    hv[j] = y
                    size += 1
                    while j > 0 and _heap_less(hd[j], hv[j], hd[(j - 1) >> 1],
                                               hv[(j - 1) >> 1]):
                        td = hd[j]; tv = hv[j]
                        hd[j] = hd[(j - 1) >> 1]; hv[j] = hv[(j - 1) >> 1]
                        hd[(j - 1) >> 1] = td; hv[(j - 1) >> 1] = tv
                        j = (j - 1) >> 1

    return dist_arr
