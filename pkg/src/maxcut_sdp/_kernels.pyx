# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: cyclic Jacobi eigensolver and Gray-code max-cut enumeration."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY

cnp.import_array()


def jacobi_eigh(a, double tol=1e-14, int max_sweeps=100):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A_arr = np.array(a, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = A_arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V_arr = np.eye(n)
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] V = V_arr
    cdef Py_ssize_t p, q, k
    cdef double scale = 0.0, off, app, aqq, apq, theta, t, c, s, x, y, d
    cdef int sweeps = 0, sweep

    for p in range(n):
        for q in range(n):
            scale += A[p, q] * A[p, q]
    scale = sqrt(scale)
    if n < 2 or scale == 0.0:
        return np.diag(A_arr).copy(), V_arr, 0

    for sweep in range(1, max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += A[p, q] * A[p, q]
        if sqrt(off) <= tol * scale:
            break
        sweeps = sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                d = aqq - app
                if fabs(d) > 1e150 * fabs(apq):
                    t = apq / d  # small-angle limit, theta^2 would overflow
                else:
                    theta = d / (2.0 * apq)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = A[k, p]
                    y = A[k, q]
                    A[k, p] = c * x - s * y
                    A[k, q] = s * x + c * y
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * y
                    A[q, k] = s * x + c * y
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
    return np.diag(A_arr).copy(), V_arr, sweeps


def brute_force_cut(W_in, double tie_tol=0.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] W_arr = np.ascontiguousarray(W_in, dtype=np.float64)
    cdef double[:, ::1] W = W_arr
    cdef Py_ssize_t n = W_arr.shape[0]
    if n == 1:
        return 1, 0.0
    cdef int free = n - 1
    cdef long long total = (<long long>1) << free
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_arr = -np.ones(n)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t i, j, v
    cdef long long g, gray, best_mask, mask, low
    cdef int b
    cdef double val = 0.0, best_val, delta

    x[0] = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            if x[i] != x[j]:
                val += W[i, j]
    best_val = val
    best_mask = 0
    mask = 0
    for g in range(1, total):
        low = g & (-g)
        b = 0
        while (low >> b) != 1:
            b += 1
        v = free - b
        delta = 0.0
        for j in range(n):
            delta += W[v, j] * x[j]
        delta *= x[v]
        val += delta
        x[v] = -x[v]
        mask ^= low
        if val > best_val + tie_tol:
            best_val = val
            best_mask = mask
        elif val >= best_val - tie_tol and mask < best_mask:
            best_mask = mask
            if val > best_val:
                best_val = val
    return int(best_mask | ((<long long>1) << free)), best_val
