"""Monte-Carlo rank experiments on random edge weights.

Sample ``i`` of a run with seed ``s`` draws its weights from
``rng.stream(s, i)``; results are therefore identical however the samples
are split across worker processes.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .graph import CliqueSumSpec, WeightedGraph, cost_matrix, edge_sum, named_graph
from .maxcut import certificate_dual, recover_cut_if_rank1
from .rng import box_muller, stream
from .sdp import DEFAULT_RANK_TOL, check_optimality, rank_report, solve
from .structure import cycle_rank1_analysis, pad_sum


class WeightMode(str, enum.Enum):
    ARBITRARY = "arbitrary"
    POSITIVE = "positive"


# Rank distribution table (fractions for ranks 1, 2, 3), 1000 samples per cell.
REFERENCE_TABLE: dict[tuple[str, WeightMode], tuple[float, float, float]] = {
    ("k3", WeightMode.ARBITRARY): (0.85, 0.15, 0.00),
    ("k3", WeightMode.POSITIVE): (0.69, 0.31, 0.00),
    ("c4", WeightMode.ARBITRARY): (0.77, 0.23, 0.00),
    ("c4", WeightMode.POSITIVE): (1.00, 0.00, 0.00),
    ("diamond", WeightMode.ARBITRARY): (0.71, 0.29, 0.00),
    ("diamond", WeightMode.POSITIVE): (0.65, 0.35, 0.00),
    ("c5", WeightMode.ARBITRARY): (0.73, 0.27, 0.00),
    ("c5", WeightMode.POSITIVE): (0.45, 0.55, 0.00),
    ("butterfly", WeightMode.ARBITRARY): (0.72, 0.25, 0.03),
    ("butterfly", WeightMode.POSITIVE): (0.50, 0.42, 0.08),
    ("c6", WeightMode.ARBITRARY): (0.70, 0.30, 0.00),
    ("c6", WeightMode.POSITIVE): (1.00, 0.00, 0.00),
    ("fish", WeightMode.ARBITRARY): (0.62, 0.34, 0.04),
    ("fish", WeightMode.POSITIVE): (0.69, 0.31, 0.00),
}
REFERENCE_SAMPLES = 1000
# rank counting needs null-space eigenvalues well below the 1e-6 cutoff
EXPERIMENT_SOLVER_TOL = 1e-10


def sample_weights(edge_count: int, mode: WeightMode | str, gen: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere of dimension ``edge_count``.

    Positive mode folds the Gaussian draw into the first orthant first.
    """
    if edge_count < 1:
        raise ValueError("edge_count must be >= 1")
    z = box_muller(gen, edge_count)
    if WeightMode(mode) is WeightMode.POSITIVE:
        z = np.abs(z)
    return z / np.linalg.norm(z)


def k3_analytic_probability(mode: WeightMode | str) -> float:
    """Probability that a random-weight triangle has a rank-1 optimum."""
    arbitrary = (6.0 - 2.0 * math.sqrt(3.0)) / 3.0
    if WeightMode(mode) is WeightMode.ARBITRARY:
        return arbitrary
    return (9.0 - 4.0 * math.sqrt(3.0)) / 3.0


def butterfly_analytic_fractions(mode: WeightMode | str) -> tuple[float, float, float]:
    p1 = k3_analytic_probability(mode)
    p2 = 1.0 - p1
    return p1 * p1, 2.0 * p1 * p2, p2 * p2


# --------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class SampleConfig:
    graph_name: str
    samples: int = REFERENCE_SAMPLES
    weight_mode: WeightMode = WeightMode.ARBITRARY
    seed: int = 0
    rank_tol: float = DEFAULT_RANK_TOL
    solver_tol: float = EXPERIMENT_SOLVER_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.rank_tol <= 0 or self.solver_tol <= 0:
            raise ValueError("tolerances must be positive")
        if named_graph(self.graph_name).m == 0:
            raise ValueError("graph has no edges: nothing to sample")

    def to_json_obj(self) -> dict:
        return {
            "graph": self.graph_name,
            "samples": self.samples,
            "mode": self.weight_mode.value,
            "seed": self.seed,
            "rank_tol": self.rank_tol,
            "solver_tol": self.solver_tol,
        }


@dataclass(frozen=True)
class SampleRecord:
    index: int
    weights: tuple[float, ...]
    converged: bool
    eigenvalues_X: tuple[float, ...]
    eigenvalues_S: tuple[float, ...]
    optimality_ok: bool


def _one_sample(topology: WeightedGraph, cfg: SampleConfig, index: int) -> SampleRecord:
    w = sample_weights(topology.m, cfg.weight_mode, stream(cfg.seed, index))
    g = topology.with_weights(w)
    C = cost_matrix(g)
    sol = solve(C, tol=cfg.solver_tol)
    rep = rank_report(sol, cfg.rank_tol)
    ok = sol.converged and check_optimality(C, sol.X, sol.S, 1e-6).ok
    return SampleRecord(
        index, tuple(float(v) for v in w), sol.converged, rep.eigenvalues_X, rep.eigenvalues_S, ok
    )


def _sample_chunk(args: tuple[SampleConfig, int, int]) -> list[SampleRecord]:
    cfg, start, stop = args
    topology = named_graph(cfg.graph_name)
    return [_one_sample(topology, cfg, i) for i in range(start, stop)]


def run_samples(cfg: SampleConfig, threads: int = 1) -> list[SampleRecord]:
    """Solve every sample of ``cfg``; records come back in index order."""
    if threads <= 1:
        return _sample_chunk((cfg, 0, cfg.samples))
    step = max(1, math.ceil(cfg.samples / (4 * threads)))
    chunks = [(cfg, s, min(s + step, cfg.samples)) for s in range(0, cfg.samples, step)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_sample_chunk, chunks))
    return [r for part in parts for r in part]


def _rank(vals: Sequence[float], tol: float) -> tuple[int, bool]:
    mags = np.abs(np.asarray(vals))
    thr = linalg.rank_threshold(mags, tol)
    ambiguous = bool(np.any((mags > thr / 10) & (mags < thr * 10)))
    return int(np.sum(mags > thr)), ambiguous


@dataclass(frozen=True)
class RankDistribution:
    counts: dict[int, int]
    excluded: int
    samples: int
    rank_tol: float
    strictly_complementary: int = 0
    optimality_failures: int = 0

    @property
    def counted(self) -> int:
        return self.samples - self.excluded

    @property
    def fractions(self) -> dict[int, float]:
        total = self.counted
        return {r: (c / total if total else 0.0) for r, c in sorted(self.counts.items())}

    def fraction(self, rank: int) -> float:
        return self.fractions.get(rank, 0.0)


def distribution_from_records(
    records: Iterable[SampleRecord], rank_tol: float = DEFAULT_RANK_TOL
) -> RankDistribution:
    counts: dict[int, int] = {}
    excluded = sc = bad = total = 0
    for rec in records:
        total += 1
        if not rec.converged:
            excluded += 1
            continue
        rx, ax = _rank(rec.eigenvalues_X, rank_tol)
        rs, as_ = _rank(rec.eigenvalues_S, rank_tol)
        if ax or as_:
            excluded += 1
            continue
        counts[rx] = counts.get(rx, 0) + 1
        sc += rx + rs == len(rec.eigenvalues_X)
        bad += not rec.optimality_ok
    return RankDistribution(dict(sorted(counts.items())), excluded, total, rank_tol, sc, bad)


def rank_distribution(cfg: SampleConfig, threads: int = 1) -> RankDistribution:
    """Histogram of the solver's primal rank over ``cfg.samples`` random weightings.

    Non-converged samples and samples with an eigenvalue within a decade of
    the rank cutoff are excluded (and counted in ``excluded``).
    """
    return distribution_from_records(run_samples(cfg, threads), cfg.rank_tol)


def strict_complementarity_rate(cfg: SampleConfig, threads: int = 1) -> float:
    """Fraction of counted samples with ``rank X + rank S = n``."""
    dist = rank_distribution(cfg, threads)
    return dist.strictly_complementary / dist.counted if dist.counted else float("nan")


def cycle_condition_probability(
    n: int, mode: WeightMode | str, samples: int, seed: int
) -> float:
    """Monte-Carlo frequency of the rank-1 cycle condition (no SDP solves)."""
    if n < 3:
        raise ValueError("cycles need n >= 3")
    gen = stream(seed, 0)
    hits = 0
    for _ in range(samples):
        w = sample_weights(n, mode, gen)
        hits += cycle_rank1_analysis(w).has_rank1
    return hits / samples


# --------------------------------------------------------------------------
# comparison against the reference table


def binomial_interval(p: float, n: int, level: float = 0.99) -> tuple[float, float]:
    """Normal-approximation interval ``p +- z sqrt(p(1-p)/n)``, clipped to [0, 1]."""
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    half = z * math.sqrt(p * (1.0 - p) / n)
    return max(0.0, p - half), min(1.0, p + half)


@dataclass
class TableCell:
    graph: str
    mode: WeightMode
    rank: int
    reference: float
    observed: float
    low: float
    high: float
    sweep: dict[float, float] = field(default_factory=dict)

    @property
    def within(self) -> bool:
        return self.low - 1e-12 <= self.observed <= self.high + 1e-12

    @property
    def within_after_sweep(self) -> bool:
        return any(self.low - 1e-12 <= f <= self.high + 1e-12 for f in self.sweep.values())


@dataclass
class TableRow:
    graph: str
    mode: WeightMode
    distribution: RankDistribution
    cells: list[TableCell]
    seed: int


SWEEP_TOLS = (1e-5, 1e-6, 1e-7)


def table_row(
    graph: str, mode: WeightMode | str, samples: int = REFERENCE_SAMPLES, seed: int = 0,
    rank_tol: float = DEFAULT_RANK_TOL, threads: int = 1, level: float = 0.99,
) -> TableRow:
    """Sample one table row and compare each rank fraction with the reference value.

    The interval is built around the reference fraction using ``samples``.
    Every cell also carries the fractions obtained at the sweep tolerances.
    """
    mode = WeightMode(mode)
    cfg = SampleConfig(graph, samples, mode, seed, rank_tol)
    records = run_samples(cfg, threads)
    dist = distribution_from_records(records, rank_tol)
    sweeps = {t: distribution_from_records(records, t) for t in SWEEP_TOLS}
    cells = []
    for r, ref in enumerate(REFERENCE_TABLE[(graph, mode)], start=1):
        low, high = binomial_interval(ref, samples, level)
        cells.append(
            TableCell(graph, mode, r, ref, dist.fraction(r), low, high,
                      {t: d.fraction(r) for t, d in sweeps.items()})
        )
    return TableRow(graph, mode, dist, cells, seed)


# --------------------------------------------------------------------------
# edge-sum conjecture probe


@dataclass
class ConjectureProbe:
    samples: int
    gated: int = 0
    skipped: int = 0
    not_converged: int = 0
    # interpretation of the shared-edge symbol -> [agree, disagree]
    tallies: dict[str, list[int]] = field(default_factory=dict)
    counterexamples: dict[str, list[list[float]]] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "samples": self.samples,
            "gated": self.gated,
            "skipped": self.skipped,
            "not_converged": self.not_converged,
            "tallies": {k: {"agree": a, "disagree": d} for k, (a, d) in self.tallies.items()},
            "counterexamples": self.counterexamples,
        }


def conjectured_dual(S1: np.ndarray, S2: np.ndarray, w1: float, sign: int) -> np.ndarray:
    """``S1 (+) S2 - (1/4) [[w1, sign w1], [sign w1, w1]]`` on the shared pair."""
    S = pad_sum(S1, S2, 2)
    n1 = S1.shape[0]
    block = np.array([[w1, sign * w1], [sign * w1, w1]])
    S[n1 - 2:n1, n1 - 2:n1] -= 0.25 * block
    return S


def probe_edge_sum_conjecture(
    spec: CliqueSumSpec, samples: int, seed: int, mode: WeightMode | str = WeightMode.ARBITRARY,
    tol: float = 1e-6, max_counterexamples: int = 5,
) -> ConjectureProbe:
    """Test the edge-sum dual conjecture on random weightings of ``edge_sum(spec)``.

    A sample is used only when both summands have rank-1 optima agreeing on
    the shared edge. For each reading of the shared-edge symbol ``w1``
    (``+w`` or ``-w`` with ``w`` the shared weight) the sample agrees when one
    of the two sign choices gives a dual-feasible ``S`` complementary to the
    solved primal of the summed graph.
    """
    glued = edge_sum(spec)
    topology = glued.graph
    # canonical labelling: g1 occupies 0..n1-1 and g2 starts at the shared pair
    images1 = sorted(glued.relabel1)
    images2 = sorted(glued.relabel2)
    a, b = glued.shared
    report = ConjectureProbe(samples, tallies={"+w": [0, 0], "-w": [0, 0]},
                             counterexamples={"+w": [], "-w": []})
    for i in range(samples):
        w = sample_weights(topology.m, mode, stream(seed, i))
        g = topology.with_weights(w)
        g1, g2 = g.induced(images1), g.induced(images2)
        s1 = solve(cost_matrix(g1), EXPERIMENT_SOLVER_TOL)
        s2 = solve(cost_matrix(g2), EXPERIMENT_SOLVER_TOL)
        if not (s1.converged and s2.converged):
            report.not_converged += 1
            continue
        x1, x2 = recover_cut_if_rank1(s1), recover_cut_if_rank1(s2)
        if x1 is None or x2 is None or x1[-2] * x1[-1] != x2[0] * x2[1]:
            report.skipped += 1
            continue
        sol = solve(cost_matrix(g), EXPERIMENT_SOLVER_TOL)
        if not sol.converged:
            report.not_converged += 1
            continue
        report.gated += 1
        C = cost_matrix(g)
        S1, S2 = certificate_dual(g1, x1), certificate_dual(g2, x2)
        shared_w = g.weight(a, b)
        for key, w1 in (("+w", shared_w), ("-w", -shared_w)):
            ok = any(
                check_optimality(C, sol.X, conjectured_dual(S1, S2, w1, s), tol).ok
                for s in (1, -1)
            )
            report.tallies[key][0 if ok else 1] += 1
            if not ok and len(report.counterexamples[key]) < max_counterexamples:
                report.counterexamples[key].append([float(v) for v in w])
    return report


def random_weighted_graph(
    n: int, gen: np.random.Generator, mode: WeightMode | str = WeightMode.ARBITRARY,
    density: float = 0.6,
) -> WeightedGraph:
    """Erdos-Renyi topology with Gaussian (or folded Gaussian) weights."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if gen.random() < density:
                w = float(box_muller(gen, 1)[0])
                if WeightMode(mode) is WeightMode.POSITIVE:
                    w = abs(w)
                edges.append((i, j, w))
    return WeightedGraph(n, tuple(edges))
