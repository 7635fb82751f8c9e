"""Symmetric-matrix helpers built on the Jacobi kernel.

The compiled kernel module is picked at import time; set ``MAXCUT_SDP_PURE=1``
to force the pure-Python implementation.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

if os.environ.get("MAXCUT_SDP_PURE") == "1":
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _fallback

BACKEND = "compiled" if kernels is not _fallback else "python"


def symmetrize(a) -> np.ndarray:
    """Return ``a`` as a float square matrix with exactly symmetric storage."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def eigh(a, tol: float = 1e-14) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""
    a = symmetrize(a)
    vals, vecs, _ = kernels.jacobi_eigh(a, tol)
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def eigvalsh(a) -> np.ndarray:
    return eigh(a)[0]


def min_eig(a) -> float:
    return float(eigvalsh(a)[0])


def rank_threshold(eigenvalues: np.ndarray, tol: float) -> float:
    scale = max(1.0, float(np.max(np.abs(eigenvalues)))) if eigenvalues.size else 1.0
    return tol * scale


def numerical_rank(M, tol: float = 1e-6) -> int:
    """Number of eigenvalues with ``|lambda| > tol * max(1, max|lambda|)``."""
    vals = eigvalsh(M)
    return int(np.sum(np.abs(vals) > rank_threshold(vals, tol)))


def psd_factor(X, tol: float = 1e-8) -> np.ndarray:
    """Return ``V`` with ``V.T @ V ~= X`` (rows are scaled eigenvectors).

    Eigenvalues in ``[-tol, 0)`` are clipped to zero; anything more negative
    raises ``np.linalg.LinAlgError``.
    """
    vals, vecs = eigh(X)
    if vals[0] < -tol:
        raise np.linalg.LinAlgError(f"matrix is not PSD (min eigenvalue {vals[0]:.3e})")
    keep = vals > 0
    return (vecs[:, keep] * np.sqrt(vals[keep])).T
