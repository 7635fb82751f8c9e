"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and results; used when the extension is not built or when
``MAXCUT_SDP_PURE=1`` is set.
"""
from __future__ import annotations

import math

import numpy as np

_CHUNK_BITS = 14


def jacobi_eigh(a, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues unsorted
    (in diagonal order) and eigenvectors as columns.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    scale = math.sqrt(float(np.sum(A * A)))
    if n < 2 or scale == 0.0:
        return np.diag(A).copy(), V, 0
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        # summed directly: total minus diagonal cancels near convergence
        off = float(np.sum(np.triu(A, 1) ** 2)) * 2.0
        if math.sqrt(off) <= tol * scale:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app, aqq = A[p, p], A[q, q]
                d = aqq - app
                if abs(d) > 1e150 * abs(apq):
                    t = apq / d  # small-angle limit, theta^2 would overflow
                else:
                    theta = d / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, sweeps


def brute_force_cut(W, tie_tol=0.0):
    """Maximise ``sum_{x_i != x_j} W_ij`` over sign vectors with ``x_0 = +1``.

    ``W`` is the dense symmetric weight matrix. Returns ``(mask, value)``
    where bit ``n-1-i`` of ``mask`` is set iff ``x_i = +1``; ties within
    ``tie_tol`` go to the smallest mask, i.e. the lexicographically
    smallest sign vector.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if n == 1:
        return 1, 0.0
    free = n - 1
    total = 1 << free
    best_mask, best_val = -1, -math.inf
    chunk = 1 << min(_CHUNK_BITS, free)
    # bit k of the free index encodes vertex n-1-k
    shifts = np.arange(free)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts[None, :]) & 1
        signs = np.empty((idx.size, n))
        signs[:, 0] = 1.0
        signs[:, 1:] = (2 * bits[:, ::-1] - 1)
        # cut(x) = (sum W - x^T W x) / 4
        quad = np.einsum("ki,ij,kj->k", signs, W, signs)
        vals = (W.sum() - quad) / 4.0
        k = int(np.argmax(vals))
        v = float(vals[k])
        if v > best_val + tie_tol:
            best_val = v
            close = np.nonzero(vals >= v - tie_tol)[0]
            best_mask = int(idx[close[0]])
        elif v >= best_val - tie_tol:
            close = np.nonzero(vals >= best_val - tie_tol)[0]
            cand = int(idx[close[0]])
            best_mask = min(best_mask, cand)
            best_val = max(best_val, v)
    return best_mask | (1 << free), best_val
