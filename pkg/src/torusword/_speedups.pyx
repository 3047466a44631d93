# cython: boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot kernels: factor counting and orbit coding.

API mirrors torusword._kernels_py; torusword.kernels picks one at import.
"""

from libc.stdint cimport int64_t, uint8_t
from libcpp.unordered_map cimport unordered_map

import numpy as np

IMPLEMENTATION = "compiled"


def count_factors(data, Py_ssize_t n, int alphabet_size=0):
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.uint8))
    cdef const uint8_t[::1] seq = arr
    cdef Py_ssize_t L = seq.shape[0]
    if n <= 0:
        raise ValueError("block length must be positive")
    if L < n:
        return {}

    cdef int64_t base = alphabet_size if alphabet_size >= 2 else 2
    cdef uint8_t c
    cdef Py_ssize_t i, j
    for i in range(L):
        c = seq[i]
        if c >= base:
            base = c + 1

    # rolling packed key only when base**n fits in 62 bits
    cdef int64_t limit = (<int64_t>1) << 62
    cdef int64_t top = 1
    cdef bint fits = True
    for j in range(n - 1):
        if top > limit / base:
            fits = False
            break
        top *= base
    if not fits or top > limit / base:
        return _count_factors_bytes(arr, n)

    cdef unordered_map[int64_t, int64_t] counts
    cdef unordered_map[int64_t, int64_t] first
    cdef int64_t key = 0
    for j in range(n):
        key = key * base + seq[j]
    counts[key] = 1
    first[key] = 0
    for i in range(1, L - n + 1):
        key = (key - top * seq[i - 1]) * base + seq[i + n - 1]
        if counts.count(key):
            counts[key] += 1
        else:
            counts[key] = 1
            first[key] = i

    raw = arr.tobytes()
    out = {}
    cdef int64_t idx
    for item in first:
        idx = item.second
        out[raw[idx : idx + n]] = counts[item.first]
    return out


def _count_factors_bytes(arr, Py_ssize_t n):
    raw = arr.tobytes()
    cdef Py_ssize_t i, L = len(raw)
    out = {}
    for i in range(L - n + 1):
        key = raw[i : i + n]
        out[key] = out.get(key, 0) + 1
    return out


def code_orbit_interval(double x0, lo, hi, shift, Py_ssize_t count, double eps):
    cdef double[::1] lo_v = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] hi_v = np.ascontiguousarray(hi, dtype=np.float64)
    cdef double[::1] sh_v = np.ascontiguousarray(shift, dtype=np.float64)
    cdef Py_ssize_t m = lo_v.shape[0]
    codes_arr = np.empty(count, dtype=np.uint8)
    cdef uint8_t[::1] codes = codes_arr
    cdef double x = x0
    cdef bint hit = False
    cdef Py_ssize_t step, i, cell, done = 0
    for step in range(count):
        cell = -1
        for i in range(m):
            if lo_v[i] <= x < hi_v[i]:
                cell = i
                break
        if cell < 0:
            hit = True
            break
        if (x - lo_v[cell] < eps and x != lo_v[cell]) or hi_v[cell] - x < eps:
            hit = True
            break
        codes[step] = <uint8_t>cell
        x += sh_v[cell]
        done += 1
    return codes_arr[:done], x, hit


def code_orbit_pgram(x0, origin, minv, shift, Py_ssize_t count, double eps):
    cdef double[:, ::1] o_v = np.ascontiguousarray(origin, dtype=np.float64)
    cdef double[:, :, ::1] mi_v = np.ascontiguousarray(minv, dtype=np.float64)
    cdef double[:, ::1] sh_v = np.ascontiguousarray(shift, dtype=np.float64)
    cdef Py_ssize_t m = o_v.shape[0]
    codes_arr = np.empty(count, dtype=np.uint8)
    cdef uint8_t[::1] codes = codes_arr
    cdef double x = x0[0]
    cdef double y = x0[1]
    cdef double tx, ty, u, v
    cdef bint hit = False
    cdef Py_ssize_t step, i, cell, done = 0
    for step in range(count):
        cell = -1
        for i in range(m):
            tx = x - o_v[i, 0]
            ty = y - o_v[i, 1]
            u = mi_v[i, 0, 0] * tx + mi_v[i, 0, 1] * ty
            v = mi_v[i, 1, 0] * tx + mi_v[i, 1, 1] * ty
            if 0.0 <= u < 1.0 and 0.0 <= v < 1.0:
                if (u < eps and u != 0.0) or (v < eps and v != 0.0) \
                        or 1.0 - u < eps or 1.0 - v < eps:
                    cell = -2
                else:
                    cell = i
                break
        if cell < 0:
            hit = True
            break
        codes[step] = <uint8_t>cell
        x += sh_v[cell, 0]
        y += sh_v[cell, 1]
        done += 1
    return codes_arr[:done], np.array([x, y]), hit
