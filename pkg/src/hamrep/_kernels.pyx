# cython: language_level=3
"""Compiled mod-p elimination kernel.

Same contract as ``_kernels_py.rref``; the elimination loops run in C, which
matters because row reduction dominates nullspace computation, submodule
spinning and membership testing.
"""

import numpy as np

BACKEND = "c"


cdef long _inv_mod(long a, long p):
    # Fermat inverse; p is prime and a is nonzero mod p.
    cdef long result = 1
    cdef long base = a % p
    cdef long e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def rref(mat, long p):
    m_arr = np.ascontiguousarray(mat, dtype=np.int64) % p
    if m_arr.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    cdef long[:, ::1] m = m_arr
    cdef Py_ssize_t rows = m.shape[0]
    cdef Py_ssize_t cols = m.shape[1]
    piv_arr = np.empty(min(rows, cols), dtype=np.int64)
    cdef long[::1] piv = piv_arr
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef long inv, factor, tmp
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                tmp = m[r, j]
                m[r, j] = m[pr, j]
                m[pr, j] = tmp
        inv = _inv_mod(m[r, c], p)
        if inv != 1:
            for j in range(c, cols):
                m[r, j] = (m[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            factor = m[i, c]
            if factor == 0:
                continue
            for j in range(c, cols):
                m[i, j] = (m[i, j] - factor * m[r, j]) % p
                if m[i, j] < 0:
                    m[i, j] += p
        piv[r] = c
        r += 1
    return m_arr, r, piv_arr[:r].copy()
