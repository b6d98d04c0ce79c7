# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: elimination over GF(p) and lattice-box scans."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef inline i64 _mulmod(i64 a, i64 b, i64 p) nogil:
    return (a * b) % p


cdef i64 _inv(i64 a, i64 p) nogil:
    cdef i64 result = 1
    cdef i64 base = a % p
    cdef i64 e = p - 2
    while e > 0:
        if e & 1:
            result = _mulmod(result, base, p)
        base = _mulmod(base, base, p)
        e >>= 1
    return result


cdef tuple _eliminate(i64[:, ::1] a, i64 p, bint full):
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 inv, f, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv(a[r, c], p)
        for j in range(c, cols):
            a[r, j] = _mulmod(a[r, j], inv, p)
        for i in range(rows):
            if i == r or (not full and i < r):
                continue
            f = a[i, c]
            if f == 0:
                continue
            for j in range(c, cols):
                a[i, j] = (a[i, j] - _mulmod(f, a[r, j], p)) % p
                if a[i, j] < 0:
                    a[i, j] += p
        pivots.append(c)
        r += 1
    return r, pivots


def rank_mod_p(mat, long long p):
    """Rank of an integer matrix over GF(p); requires p < 2**31."""
    cdef i64[:, ::1] a = np.ascontiguousarray(np.mod(np.asarray(mat, dtype=np.int64), p))
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    r, _ = _eliminate(a, p, False)
    return r


def rref_mod_p(mat, long long p):
    """Reduced row echelon form over GF(p); returns (matrix, pivot columns)."""
    arr = np.ascontiguousarray(np.mod(np.asarray(mat, dtype=np.int64), p))
    cdef i64[:, ::1] a = arr
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return arr, []
    _, pivots = _eliminate(a, p, True)
    return arr, pivots


def box_scan(normals, offsets, lo, hi):
    """All integer x with lo <= x <= hi and normals @ x >= offsets."""
    cdef i64[:, ::1] nm = np.ascontiguousarray(np.asarray(normals, dtype=np.int64))
    cdef i64[::1] off = np.ascontiguousarray(np.asarray(offsets, dtype=np.int64))
    cdef i64[::1] l = np.ascontiguousarray(np.asarray(lo, dtype=np.int64))
    cdef i64[::1] h = np.ascontiguousarray(np.asarray(hi, dtype=np.int64))
    cdef Py_ssize_t n = l.shape[0], f = nm.shape[0]
    cdef Py_ssize_t k, i
    cdef i64 s
    cdef bint ok
    out = []
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    for k in range(n):
        if l[k] > h[k]:
            return np.zeros((0, n), dtype=np.int64)
    cdef i64[::1] x = np.array(l, dtype=np.int64)
    while True:
        ok = True
        for i in range(f):
            s = 0
            for k in range(n):
                s += nm[i, k] * x[k]
            if s < off[i]:
                ok = False
                break
        if ok:
            out.append(tuple(x))
        k = 0
        while k < n:
            if x[k] < h[k]:
                x[k] += 1
                break
            x[k] = l[k]
            k += 1
        if k == n:
            break
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(out, dtype=np.int64)
