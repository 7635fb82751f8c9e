"""Structural results on max-cut SDP solutions.

* cycles: when the optimum is rank 1, and the unique optimal cut;
* vertex sums: optimal primal/dual pairs glued from the two parts;
* diamonds (two triangles sharing an edge): which sign pattern is optimal
  and the closed-form dual certificate.

Diamonds use the canonical labelling of :func:`graph.named_graph` ``"diamond"``:
vertices ``0..3``, edge order ``(0,1) (0,2) (1,2) (1,3) (2,3)``, shared edge
``(1, 2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .graph import WeightedGraph, laplacian, named_graph, signed_graph
from .maxcut import brute_force_maxcut, certificate_dual, cut_value, rank1_certificate

DIAMOND_EDGES = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))


class PreconditionError(ValueError):
    pass


# --------------------------------------------------------------------------
# cycles


class CycleReason(str, enum.Enum):
    EVEN_POSITIVES = "EvenPositives"
    DOMINANT_WEIGHT = "DominantWeight"
    NONE = "None"


@dataclass(frozen=True)
class CycleAnalysis:
    has_rank1: bool
    reason: CycleReason
    dominant_edge: int | None
    optimal_cut: tuple[int, ...] | None
    dominant_margin: float

    def to_json_obj(self) -> dict:
        return {
            "has_rank1": self.has_rank1,
            "reason": self.reason.value,
            "dominant_edge": self.dominant_edge,
            "optimal_cut": list(self.optimal_cut) if self.optimal_cut else None,
            "dominant_margin": self.dominant_margin,
        }


def _cycle_cut(weights: np.ndarray, flipped: int | None) -> tuple[int, ...]:
    # w_i x_i x_{i+1} < 0 on every edge except ``flipped`` where it is > 0
    x = [1]
    for i, w in enumerate(weights[:-1]):
        s = 1 if w > 0 else -1
        x.append(x[-1] * (s if i == flipped else -s))
    return tuple(x)


def cycle_rank1_analysis(weights: Sequence[float]) -> CycleAnalysis:
    """Decide whether the cycle with edge weights ``weights`` has a rank-1 optimum.

    ``weights[i]`` is the weight of edge ``(i, i+1 mod n)``. Rank 1 holds iff
    the number of positive weights is even, or the smallest ``|w_m|``
    satisfies ``1/|w_m| >= sum_{i != m} 1/|w_i|`` (equality included). The
    returned cut is the unique optimum with ``x_0 = +1``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 3:
        raise ValueError("a cycle needs at least 3 edge weights")
    if np.any(w == 0) or not np.all(np.isfinite(w)):
        raise ValueError("cycle weights must be finite and nonzero")
    inv = 1.0 / np.abs(w)
    m = int(np.argmax(inv))
    margin = float(inv[m] - (inv.sum() - inv[m]))
    if int(np.sum(w > 0)) % 2 == 0:
        return CycleAnalysis(True, CycleReason.EVEN_POSITIVES, None, _cycle_cut(w, None), margin)
    if margin >= 0:
        return CycleAnalysis(True, CycleReason.DOMINANT_WEIGHT, m, _cycle_cut(w, m), margin)
    return CycleAnalysis(False, CycleReason.NONE, None, None, margin)


def cycle_graph_with(weights: Sequence[float]) -> WeightedGraph:
    return named_graph(f"c{len(weights)}", weights)


def cycle_symmetric_minor_determinant(weights: Sequence[float], m: int) -> float:
    """Determinant of the lower-right ``m x m`` block of ``-L(C_n, w)``.

    Evaluated with the recurrence ``d_k = -a_k d_{k-1} + (-1)^k P_k`` where,
    in 1-based edge labels, ``a_k = w_{n-k}`` and ``P_k = w_{n-k+1} ... w_n``,
    starting from ``d_0 = 1``. The result is the ``m``-th elementary symmetric
    polynomial of ``-w_{n-m}, ..., -w_n``.
    """
    w = [float(v) for v in weights]
    n = len(w)
    if not 1 <= m < n:
        raise IndexError(f"m must satisfy 1 <= m < {n}, got {m}")
    one_based = lambda k: w[k - 1]  # noqa: E731
    d, tail = 1.0, 1.0
    for k in range(1, m + 1):
        tail *= one_based(n - k + 1)
        d = -one_based(n - k) * d + (-1) ** k * tail
    return d


# --------------------------------------------------------------------------
# vertex sums


@dataclass(frozen=True)
class VertexSumComposition:
    X_composed: np.ndarray
    S_composed: np.ndarray
    rank_formula_value: int
    rank_X1: int
    rank_X2: int

    def to_json_obj(self) -> dict:
        return {
            "X_composed": self.X_composed.tolist(),
            "S_composed": self.S_composed.tolist(),
            "rank_formula_value": self.rank_formula_value,
            "rank_X1": self.rank_X1,
            "rank_X2": self.rank_X2,
        }


def _pair_residual(X: np.ndarray, S: np.ndarray) -> float:
    """Largest violation of diag(X) = 1, X psd, S psd, XS = 0."""
    return max(
        float(np.max(np.abs(np.diag(X) - 1.0))),
        -linalg.min_eig(X),
        -linalg.min_eig(S),
        float(np.max(np.abs(X @ S))),
    )


def pad_sum(S1: np.ndarray, S2: np.ndarray, overlap: int) -> np.ndarray:
    """``S1`` in the top-left and ``S2`` in the bottom-right, sharing ``overlap`` indices."""
    n1, n2 = S1.shape[0], S2.shape[0]
    n = n1 + n2 - overlap
    out = np.zeros((n, n))
    out[:n1, :n1] += S1
    out[n1 - overlap:, n1 - overlap:] += S2
    return out


def compose_vertex_sum(X1, S1, X2, S2, tol: float = 1e-6) -> VertexSumComposition:
    """Glue optimal pairs of two graphs into an optimal pair of their vertex sum.

    The glued vertex must be the last index of the first graph and the first
    index of the second (the labelling produced by :func:`graph.vertex_sum`).
    ``tol`` is used both for the optimality screen of the inputs and for the
    numerical ranks.
    """
    X1, S1, X2, S2 = (linalg.symmetrize(a) for a in (X1, S1, X2, S2))
    if X1.shape != S1.shape or X2.shape != S2.shape:
        raise ValueError("dimension mismatch between primal and dual matrices")
    for k, (X, S) in enumerate(((X1, S1), (X2, S2)), start=1):
        res = _pair_residual(X, S)
        if res > tol:
            raise PreconditionError(f"pair {k} is not optimal (residual {res:.2e})")
    n1, n2 = X1.shape[0], X2.shape[0]
    Y1, y1 = X1[:-1, :-1], X1[:-1, -1]
    Y2, y2 = X2[1:, 1:], X2[1:, 0]
    n = n1 + n2 - 1
    X = np.empty((n, n))
    X[: n1 - 1, : n1 - 1] = Y1
    X[: n1 - 1, n1 - 1] = y1
    X[n1 - 1, : n1 - 1] = y1
    X[n1 - 1, n1 - 1] = 1.0
    X[n1 - 1, n1:] = y2
    X[n1:, n1 - 1] = y2
    X[n1:, n1:] = Y2
    X[: n1 - 1, n1:] = np.outer(y1, y2)
    X[n1:, : n1 - 1] = np.outer(y2, y1)
    r1 = linalg.numerical_rank(X1, tol)
    r2 = linalg.numerical_rank(X2, tol)
    return VertexSumComposition(X, pad_sum(S1, S2, 1), r1 + r2 - 1, r1, r2)


def _reflector(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal matrix mapping unit vector ``u`` to unit vector ``v``."""
    d = u - v
    nd = float(d @ d)
    if nd < 1e-30:
        return np.eye(u.size)
    return np.eye(u.size) - 2.0 * np.outer(d, d) / nd


def vertex_sum_low_rank_completion(X1, X2, tol: float = 1e-6) -> np.ndarray:
    """An optimal vertex-sum primal of rank ``max(rank X1, rank X2)``.

    Both Gram factorisations are embedded in a common space of dimension
    ``r = max(rank X1, rank X2)`` and the second is reflected so that the two
    copies of the glued vertex coincide. The diagonal blocks (and hence the
    objective) equal those of :func:`compose_vertex_sum`; only the
    off-diagonal blocks change.
    """
    X1, X2 = linalg.symmetrize(X1), linalg.symmetrize(X2)
    r1 = linalg.numerical_rank(X1, tol)
    r2 = linalg.numerical_rank(X2, tol)
    r = max(r1, r2)

    def factor(X, k):
        vals, vecs = linalg.eigh(X)
        vals, vecs = vals[::-1][:k], vecs[:, ::-1][:, :k]
        V = (vecs * np.sqrt(np.clip(vals, 0.0, None))).T
        out = np.zeros((r, X.shape[0]))
        out[:k] = V
        return out

    V1, V2 = factor(X1, r1), factor(X2, r2)
    u1 = V1[:, -1] / np.linalg.norm(V1[:, -1])
    u2 = V2[:, 0] / np.linalg.norm(V2[:, 0])
    V2 = _reflector(u2, u1) @ V2
    V = np.hstack((V1, V2[:, 1:]))
    return V.T @ V


def vertex_sum_min_rank_exists(X1, X2, tol: float = 1e-6) -> int:
    """Rank achievable by some optimal primal of the vertex sum.

    Returns ``max(rank X1, rank X2)`` after checking that the completion from
    :func:`vertex_sum_low_rank_completion` really attains it.
    """
    X1, X2 = linalg.symmetrize(X1), linalg.symmetrize(X2)
    target = max(linalg.numerical_rank(X1, tol), linalg.numerical_rank(X2, tol))
    Xc = vertex_sum_low_rank_completion(X1, X2, tol)
    n1 = X1.shape[0]
    blocks_ok = np.allclose(Xc[:n1, :n1], X1, atol=10 * tol) and np.allclose(
        Xc[n1 - 1:, n1 - 1:], X2, atol=10 * tol
    )
    if not blocks_ok or linalg.numerical_rank(Xc, tol) > target:
        raise RuntimeError("low-rank completion did not reproduce the component solutions")
    return target


# --------------------------------------------------------------------------
# diamond = edge sum of two triangles


class DiamondRegime(str, enum.Enum):
    ALIGNED = "Aligned"
    FLIPPED = "Flipped"
    NEITHER = "Neither"


@dataclass(frozen=True)
class DiamondAnalysis:
    """Classification of a positive-weight diamond.

    ``regime`` is decided by the exact psd thresholds of the two candidate
    certificates: Aligned iff ``w23 <= h1 + h2`` and Flipped iff
    ``w23 >= g1 + g2``, with ``h`` the series and ``g`` the signed-series
    conductance of each triangle's outer path (see :func:`diamond_analysis`).
    ``stated_regime`` applies the stricter aligned test ``w23 <= min(h1, h2)``
    instead; it can miss optimal aligned cuts when the shared edge is cut in
    both triangles.
    """

    regime: DiamondRegime
    x_star: tuple[int, ...] | None
    S_star: np.ndarray | None
    condition_lhs: float
    condition_rhs: float
    stated_regime: DiamondRegime
    precondition_met: bool

    def to_json_obj(self) -> dict:
        return {
            "regime": self.regime.value,
            "x_star": list(self.x_star) if self.x_star else None,
            "S_star": self.S_star.tolist() if self.S_star is not None else None,
            "condition_lhs": self.condition_lhs,
            "condition_rhs": self.condition_rhs,
            "stated_regime": self.stated_regime.value,
            "precondition_met": self.precondition_met,
        }


def _diamond_weights(g: WeightedGraph) -> tuple[float, float, float, float, float]:
    if g.n != 4 or g.m != 5:
        raise PreconditionError("expected the canonical diamond (4 vertices, 5 edges)")
    ws = []
    for i, j in DIAMOND_EDGES:
        w = g.weight(i, j)
        if w is None:
            raise PreconditionError(f"diamond is missing edge {(i, j)}")
        ws.append(w)
    return tuple(ws)  # type: ignore[return-value]


def diamond_triangles(g: WeightedGraph) -> tuple[CycleAnalysis, CycleAnalysis]:
    """Cycle analyses of the triangles ``{0,1,2}`` and ``{1,2,3}``.

    Triangle cycles are ordered so that their cut vectors read
    ``(x0, x1, x2)`` and ``(x1, x2, x3)``.
    """
    w12, w13, w23, w24, w34 = _diamond_weights(g)
    # cycle 0->1->2->0: edges (0,1) (1,2) (2,0)
    t1 = cycle_rank1_analysis([w12, w23, w13])
    # cycle 1->2->3->1 in local labels 0->1->2->0
    t2 = cycle_rank1_analysis([w23, w34, w24])
    return t1, t2


def _triangles_agree(t1: CycleAnalysis, t2: CycleAnalysis) -> bool:
    if not (t1.has_rank1 and t2.has_rank1):
        return False
    a, b = t1.optimal_cut, t2.optimal_cut
    return a[1] * a[2] == b[0] * b[1]


def diamond_dual(g: WeightedGraph, x: Sequence[int]) -> np.ndarray:
    """Closed-form dual for ``x x^T`` assembled from the two triangle duals.

    ``S1 (+) S2`` counts the shared edge twice; the correction removes one
    copy, which is the block ``(1/4)[[-w1, w1], [w1, -w1]]`` with
    ``w1 = -w23`` when ``x1 = x2`` and ``(1/4)[[w1, w1], [w1, w1]]`` with
    ``w1 = -w23`` when ``x1 = -x2``.
    """
    w12, w13, w23, w24, w34 = _diamond_weights(g)
    x = tuple(int(v) for v in x)
    t1 = WeightedGraph(3, ((0, 1, w12), (0, 2, w13), (1, 2, w23)))
    t2 = WeightedGraph(3, ((0, 1, w23), (0, 2, w24), (1, 2, w34)))
    S = pad_sum(certificate_dual(t1, x[:3]), certificate_dual(t2, x[1:]), 2)
    w1 = -w23
    if x[1] == x[2]:
        corr = np.array([[-w1, w1], [w1, -w1]])
    else:
        corr = np.array([[w1, w1], [w1, w1]])
    S[1:3, 1:3] += 0.25 * corr
    return S


def diamond_analysis(g: WeightedGraph, check_precondition: bool = True) -> DiamondAnalysis:
    """Classify a diamond with positive weights into Aligned / Flipped / Neither.

    In 1-based labels with ``h1 = 1/(1/w12 + 1/w13)``, ``h2 = 1/(1/w24 + 1/w34)``,
    ``g1 = 1/|1/w12 - 1/w13|`` and ``g2 = 1/|1/w24 - 1/w34|``:

    * Aligned: ``x = (-1, 1, 1, -1)`` is optimal, iff ``w23 <= h1 + h2``;
    * Flipped: ``x = (e1, -1, 1, e2)`` is optimal for some signs, iff
      ``w23 >= g1 + g2`` (impossible when ``w12 == w13`` or ``w24 == w34``).

    With ``check_precondition`` the two triangles must have rank-1 optima that
    agree on the shared edge; otherwise :class:`PreconditionError` is raised.
    """
    w12, w13, w23, w24, w34 = _diamond_weights(g)
    if min(w12, w13, w23, w24, w34) <= 0:
        raise PreconditionError("diamond analysis needs strictly positive weights")
    t1, t2 = diamond_triangles(g)
    agree = _triangles_agree(t1, t2)
    if check_precondition and not agree:
        raise PreconditionError(
            "triangle subproblems must both be rank 1 and agree on the shared edge"
        )
    h1 = 1.0 / (1.0 / w12 + 1.0 / w13)
    h2 = 1.0 / (1.0 / w24 + 1.0 / w34)
    d1 = abs(1.0 / w12 - 1.0 / w13)
    d2 = abs(1.0 / w24 - 1.0 / w34)
    flip_rhs = math.inf if d1 == 0 or d2 == 0 else 1.0 / d1 + 1.0 / d2

    stated = DiamondRegime.NEITHER
    if w23 <= min(h1, h2):
        stated = DiamondRegime.ALIGNED
    elif w23 >= flip_rhs:
        stated = DiamondRegime.FLIPPED

    if w23 <= h1 + h2:
        regime, rhs = DiamondRegime.ALIGNED, h1 + h2
        x_star: tuple[int, ...] | None = (-1, 1, 1, -1)
    elif w23 >= flip_rhs:
        regime, rhs = DiamondRegime.FLIPPED, flip_rhs
        best = brute_force_maxcut(g).value
        cands = [(e1, -1, 1, e2) for e1 in (-1, 1) for e2 in (-1, 1)]
        x_star = max(cands, key=lambda c: (cut_value(g, c), c))
        if cut_value(g, x_star) < best - 1e-12 * max(1.0, abs(best)):
            raise RuntimeError("no flipped sign pattern attains the maximum cut")
    else:
        regime, rhs, x_star = DiamondRegime.NEITHER, flip_rhs, None

    S_star = None
    if x_star is not None:
        S_star = diamond_dual(g, x_star)
        if not rank1_certificate(g, x_star, tol=1e-9 * max(1.0, w23)):
            raise RuntimeError("rank-1 certificate failed for the classified sign pattern")
    return DiamondAnalysis(regime, x_star, S_star, w23, rhs, stated, agree)


def diamond_flipped_minor_determinant(g: WeightedGraph, x: Sequence[int]) -> float:
    """Determinant of the leading 3x3 block of ``L(G, w')``, ``w'_ij = -x_i x_j w_ij``.

    Expanded by cofactors along the first row.
    """
    M = laplacian(signed_graph(g, [int(v) for v in x]))
    a, b, c = M[0, 0], M[0, 1], M[0, 2]
    d, e, f = M[1, 1], M[1, 2], M[2, 2]
    return float(a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c))
