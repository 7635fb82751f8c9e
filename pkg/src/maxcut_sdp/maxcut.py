"""Max-cut layer: exact oracle, cut recovery, hyperplane rounding, rank-1 certificates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .graph import WeightedGraph, cost_matrix, laplacian, signed_graph
from .rng import box_muller, stream
from .sdp import SdpSolution

MAX_BRUTE_FORCE_N = 26


class SizeGuardError(ValueError):
    pass


def as_cut(x: Sequence[float]) -> np.ndarray:
    """Validate a +-1 vector and return it as an int array."""
    arr = np.asarray(x)
    if arr.ndim != 1 or not np.all(np.isin(arr, (-1, 1))):
        raise ValueError(f"cut vector entries must be +-1, got {x!r}")
    return arr.astype(int)


@dataclass(frozen=True)
class CutResult:
    x: tuple[int, ...]
    value: float
    seed: int | None = None

    def to_json_obj(self) -> dict:
        obj = {"x": list(self.x), "value": self.value}
        if self.seed is not None:
            obj["seed"] = self.seed
        return obj


def cut_value(g: WeightedGraph, x: Sequence[int]) -> float:
    """Total weight of edges whose endpoints get opposite signs."""
    return float(sum(w for i, j, w in g.edges if x[i] != x[j]))


def weight_matrix(g: WeightedGraph) -> np.ndarray:
    W = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        W[i, j] = W[j, i] = w
    return W


def _decode(mask: int, n: int) -> tuple[int, ...]:
    return tuple(1 if (mask >> (n - 1 - i)) & 1 else -1 for i in range(n))


def brute_force_maxcut(g: WeightedGraph, kernels=None) -> CutResult:
    """Exact max cut by enumerating all ``2^(n-1)`` cuts with ``x_0 = +1``.

    Ties go to the lexicographically smallest ``x`` (with ``-1 < +1``).
    """
    if g.n > MAX_BRUTE_FORCE_N:
        raise SizeGuardError(f"brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {g.n}")
    kernels = kernels or linalg.kernels
    scale = float(np.sum(np.abs(g.weights))) if g.m else 0.0
    mask, _ = kernels.brute_force_cut(weight_matrix(g), 1e-10 * max(scale, 1.0))
    x = _decode(mask, g.n)
    return CutResult(x, cut_value(g, x))


def all_maximizers(g: WeightedGraph, tol: float = 1e-9) -> list[tuple[int, ...]]:
    """Every optimal cut with ``x_0 = +1`` (plain enumeration, small n only)."""
    if g.n > 16:
        raise SizeGuardError("all_maximizers is limited to n <= 16")
    best, found = -np.inf, []
    for mask in range(1 << (g.n - 1)):
        x = _decode(mask | (1 << (g.n - 1)), g.n)
        v = cut_value(g, x)
        if v > best + tol:
            best, found = v, [x]
        elif v >= best - tol:
            found.append(x)
    return found


def sdp_value(g: WeightedGraph, sol: SdpSolution) -> float:
    return float(np.sum(cost_matrix(g) * sol.X))


def recover_cut_if_rank1(sol: SdpSolution, tol: float = 1e-6) -> np.ndarray | None:
    """Sign vector ``x`` with ``X = x x^T`` if the solution is numerically rank 1."""
    X = sol.X
    if linalg.numerical_rank(X, tol) != 1:
        return None
    vals, vecs = linalg.eigh(X)
    v = vecs[:, -1] * np.sqrt(max(vals[-1], 0.0))
    if v[0] < 0:
        v = -v
    if np.max(np.abs(np.abs(v) - 1.0)) > tol:
        return None
    return np.where(v >= 0, 1, -1)


def gw_round(
    g: WeightedGraph, sol: SdpSolution, trials: int = 100, seed: int = 0, tol: float = 1e-8
) -> CutResult:
    """Goemans-Williamson hyperplane rounding; best cut over ``trials`` hyperplanes.

    Trial ``t`` draws its normal vector from stream ``(seed, t)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    V = linalg.psd_factor(sol.X, tol=np.sqrt(tol))
    best_x, best_val = None, -np.inf
    for t in range(trials):
        r = box_muller(stream(seed, t), V.shape[0])
        x = np.where(r @ V >= 0, 1, -1)
        if x[0] < 0:
            x = -x
        val = cut_value(g, x)
        if val > best_val:
            best_x, best_val = x, val
    return CutResult(tuple(int(v) for v in best_x), best_val, seed)


def signed_laplacian(g: WeightedGraph, x: Sequence[int]) -> np.ndarray:
    """``L(G, w')`` with ``w'_ij = -x_i x_j w_ij``."""
    return laplacian(signed_graph(g, as_cut(x)))


def certificate_dual(g: WeightedGraph, x: Sequence[int]) -> np.ndarray:
    """Dual slack certifying ``x x^T``: ``S = D_x L(G, w') D_x / 4``.

    It has the off-diagonal entries of ``Diag(y) - C``, satisfies ``S x = 0``
    and is unitarily similar to ``L(G, w') / 4``.
    """
    x = as_cut(x)
    return 0.25 * (x[:, None] * signed_laplacian(g, x) * x[None, :])


def rank1_certificate(g: WeightedGraph, x: Sequence[int], tol: float = 1e-9) -> bool:
    """True iff the signed Laplacian of ``x`` is psd, i.e. ``x x^T`` is SDP-optimal."""
    if g.n == 1:
        return True
    return linalg.min_eig(signed_laplacian(g, x)) >= -tol
