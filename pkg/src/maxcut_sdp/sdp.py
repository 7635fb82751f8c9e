"""Primal-dual interior-point solver for the max-cut SDP.

Primal:  max C.X   s.t. diag(X) = 1, X psd
Dual:    min sum(y) s.t. S = Diag(y) - C psd

The iteration is the HKM (XZ) direction with a Mehrotra predictor-corrector,
started from the strictly feasible pair X = I, y = (1 + max row sum |C|) 1.
The centring parameter is floored at ``SIGMA_FLOOR``: slower than pure
Mehrotra by a few iterations but the iterates stay well centred, which is what
lets the gap reach 1e-10 and keeps ||XS|| of the order of the gap.
Both iterates stay feasible, so the reported gap is exactly X.S. Central-path
methods converge to the relative interior of the optimal face, i.e. to a
maximum-rank optimal X.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import eigvalsh, rank_threshold, symmetrize

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
DEFAULT_RANK_TOL = 1e-6
SIGMA_FLOOR = 0.2
STEP_FRACTION = 0.9


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class SdpProblem:
    C: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "C", symmetrize(self.C))

    @property
    def n(self) -> int:
        return self.C.shape[0]


@dataclass
class SdpSolution:
    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: Status
    history: list[tuple[float, float]] = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def to_json_obj(self) -> dict:
        return {
            "status": self.status.value,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "iterations": self.iterations,
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "S": self.S.tolist(),
        }


def _max_step(M: np.ndarray, dM: np.ndarray) -> float:
    """Largest alpha with M + alpha dM psd (M positive definite)."""
    L = np.linalg.cholesky(M)
    Linv = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(Linv @ dM @ Linv.T)[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _backtrack(point, alpha: float, tries: int = 30) -> float:
    """Shrink ``alpha`` until ``point(alpha)`` has a Cholesky factorisation."""
    for _ in range(tries):
        try:
            np.linalg.cholesky(point(alpha))
            return alpha
        except np.linalg.LinAlgError:
            alpha *= 0.5
    raise np.linalg.LinAlgError("no positive definite step found")


def _direction(X, Zinv, M_chol, rhs_mu, extra=None):
    """Solve for (dy, dX) of the HKM system with the given centring target.

    ``extra`` is the second-order correction Zinv dZa dXa of the corrector.
    """
    n = X.shape[0]
    rhs = rhs_mu * np.diag(Zinv) - np.ones(n)
    if extra is not None:
        rhs = rhs - np.diag(extra)
    dy = np.linalg.solve(M_chol.T, np.linalg.solve(M_chol, rhs))
    dX = rhs_mu * Zinv - X - (Zinv * dy[None, :]) @ X
    if extra is not None:
        dX = dX - extra
    return dy, 0.5 * (dX + dX.T)


def solve(
    p: SdpProblem | np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SdpSolution:
    """Solve the max-cut SDP with cost ``p.C`` to relative gap ``tol``."""
    if not isinstance(p, SdpProblem):
        p = SdpProblem(p)
    if tol <= 0:
        raise ValueError("tol must be positive")
    C, n = p.C, p.n
    e = np.ones(n)
    X = np.eye(n)
    y = (1.0 + np.max(np.sum(np.abs(C), axis=1))) * e
    Z = np.diag(y) - C
    best = None
    history = []
    status = Status.MAX_ITERATIONS
    it = 0
    for it in range(max_iter + 1):
        pval = float(np.sum(C * X))
        dval = float(np.sum(y))
        gap = float(np.sum(X * Z))
        history.append((pval, dval))
        if not (math.isfinite(pval) and math.isfinite(dval) and math.isfinite(gap)):
            status = Status.NUMERICAL_FAILURE
            break
        best = (X, y, Z, pval, dval, gap)
        if gap <= tol * max(1.0, abs(pval)):
            status = Status.CONVERGED
            break
        if it == max_iter:
            break
        mu = gap / n
        try:
            Zinv = np.linalg.inv(Z)
            Zinv = 0.5 * (Zinv + Zinv.T)
            M = Zinv * X
            M_chol = np.linalg.cholesky(M)
            # predictor
            dy_a, dX_a = _direction(X, Zinv, M_chol, 0.0)
            dZ_a = np.diag(dy_a)
            ap = min(1.0, _max_step(X, dX_a))
            ad = min(1.0, _max_step(Z, dZ_a))
            mu_aff = float(np.sum((X + ap * dX_a) * (Z + ad * dZ_a))) / n
            # the floor keeps iterates near the central path so XS ~ mu I
            sigma = min(1.0, max(SIGMA_FLOOR, (mu_aff / mu) ** 3))
            # corrector
            extra = Zinv @ dZ_a @ dX_a
            dy, dX = _direction(X, Zinv, M_chol, sigma * mu, extra)
            dZ = np.diag(dy)
            ap = min(1.0, STEP_FRACTION * _max_step(X, dX))
            ad = min(1.0, STEP_FRACTION * _max_step(Z, dZ))
            ap = _backtrack(lambda a: X + a * dX, ap)
            ad = _backtrack(lambda a: Z + a * dZ, ad)
        except np.linalg.LinAlgError:
            status = Status.NUMERICAL_FAILURE
            break
        X = X + ap * dX
        X = 0.5 * (X + X.T)
        np.fill_diagonal(X, 1.0)
        y = y + ad * dy
        Z = np.diag(y) - C
    if best is None:
        X, y, Z, pval, dval, gap = np.eye(n), y, Z, math.nan, math.nan, math.nan
    else:
        X, y, Z, pval, dval, gap = best
    return SdpSolution(
        X=X, y=y, S=Z, primal_value=pval, dual_value=dval, gap=dval - pval,
        iterations=it, status=status, history=history,
    )


# --------------------------------------------------------------------------
# optimality and rank


@dataclass(frozen=True)
class OptimalityCheck:
    ok: bool
    diag_residual: float
    min_eig_X: float
    dual_residual: float
    min_eig_S: float
    complementarity: float
    y: np.ndarray = field(repr=False)

    def __bool__(self) -> bool:
        return self.ok


def check_optimality(p: SdpProblem | np.ndarray, X, S, tol: float = 1e-6) -> OptimalityCheck:
    """Check primal feasibility, dual feasibility and ``XS = 0``.

    The dual vector is recovered as ``y_i = S_ii + C_ii``; the dual residual is
    the largest entry of ``S - (Diag(y) - C)``, i.e. the off-diagonal mismatch.
    """
    C = p.C if isinstance(p, SdpProblem) else symmetrize(p)
    X = np.asarray(X, dtype=float)
    S = np.asarray(S, dtype=float)
    if X.shape != C.shape or S.shape != C.shape:
        raise ValueError("dimension mismatch")
    X, S = symmetrize(X), symmetrize(S)
    y = np.diag(S) + np.diag(C)
    diag_res = float(np.max(np.abs(np.diag(X) - 1.0)))
    dual_res = float(np.max(np.abs(S - (np.diag(y) - C))))
    lx = float(eigvalsh(X)[0])
    ls = float(eigvalsh(S)[0])
    comp = float(np.max(np.abs(X @ S)))
    ok = diag_res <= tol and lx >= -tol and dual_res <= tol and ls >= -tol and comp <= tol
    return OptimalityCheck(ok, diag_res, lx, dual_res, ls, comp, y)


@dataclass(frozen=True)
class RankReport:
    rank_X: int
    rank_S: int
    eigenvalues_X: tuple[float, ...]
    eigenvalues_S: tuple[float, ...]
    strictly_complementary: bool
    tolerance_used: float
    pataki_ok: bool
    ambiguous: bool

    def to_json_obj(self) -> dict:
        return {
            "rank_X": self.rank_X,
            "rank_S": self.rank_S,
            "eigenvalues_X": list(self.eigenvalues_X),
            "eigenvalues_S": list(self.eigenvalues_S),
            "strictly_complementary": self.strictly_complementary,
            "tolerance_used": self.tolerance_used,
            "pataki_ok": self.pataki_ok,
            "ambiguous": self.ambiguous,
        }


def _count(vals: np.ndarray, tol: float) -> tuple[int, bool]:
    thr = rank_threshold(vals, tol)
    mags = np.abs(vals)
    # an eigenvalue within a decade of the cutoff makes the count unreliable
    ambiguous = bool(np.any((mags > thr / 10) & (mags < thr * 10)))
    return int(np.sum(mags > thr)), ambiguous


def rank_report(sol: SdpSolution, tol: float = DEFAULT_RANK_TOL) -> RankReport:
    n = sol.X.shape[0]
    vx = eigvalsh(sol.X)
    vs = eigvalsh(sol.S)
    rx, amb_x = _count(vx, tol)
    rs, amb_s = _count(vs, tol)
    return RankReport(
        rank_X=rx,
        rank_S=rs,
        eigenvalues_X=tuple(float(v) for v in vx),
        eigenvalues_S=tuple(float(v) for v in vs),
        strictly_complementary=rx + rs == n,
        tolerance_used=tol,
        pataki_ok=rx * (rx + 1) // 2 <= n,
        ambiguous=amb_x or amb_s,
    )
