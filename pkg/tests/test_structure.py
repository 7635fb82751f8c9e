import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from maxcut_sdp.graph import (
    CliqueSumSpec,
    WeightedGraph,
    complete_graph,
    cost_matrix,
    laplacian,
    named_graph,
    signed_graph,
    vertex_sum,
)
from maxcut_sdp.experiments import random_weighted_graph
from maxcut_sdp.linalg import min_eig, numerical_rank
from maxcut_sdp.maxcut import (
    all_maximizers,
    brute_force_maxcut,
    certificate_dual,
    cut_value,
    rank1_certificate,
    recover_cut_if_rank1,
)
from maxcut_sdp.rng import stream
from maxcut_sdp.sdp import check_optimality, solve
from maxcut_sdp.structure import (
    CycleReason,
    DiamondRegime,
    PreconditionError,
    compose_vertex_sum,
    cycle_graph_with,
    cycle_rank1_analysis,
    cycle_symmetric_minor_determinant,
    diamond_analysis,
    diamond_dual,
    diamond_flipped_minor_determinant,
    pad_sum,
    vertex_sum_low_rank_completion,
    vertex_sum_min_rank_exists,
)
from oracles import dense_det

nonzero = st.floats(0.05, 5).flatmap(lambda a: st.sampled_from([a, -a]))

# ---------------------------------------------------------------- cycles


def test_cycle_even_positives():
    res = cycle_rank1_analysis([1, 1, -1])
    assert res.has_rank1 and res.reason is CycleReason.EVEN_POSITIVES
    g = cycle_graph_with([1, 1, -1])
    assert res.optimal_cut[0] == 1
    assert cut_value(g, res.optimal_cut) == 2  # both positive edges cut


def test_cycle_no_rank1():
    res = cycle_rank1_analysis([1, 1, 1])
    assert not res.has_rank1 and res.reason is CycleReason.NONE and res.optimal_cut is None
    assert res.dominant_margin == pytest.approx(-1.0)


def test_cycle_dominant_weight():
    res = cycle_rank1_analysis([0.1, 1, 1])
    assert res.has_rank1 and res.reason is CycleReason.DOMINANT_WEIGHT and res.dominant_edge == 0
    assert res.dominant_margin == pytest.approx(8.0)
    assert rank1_certificate(cycle_graph_with([0.1, 1, 1]), res.optimal_cut)


def test_cycle_equality_counts_as_rank1():
    res = cycle_rank1_analysis([0.5, 1, 1])
    assert res.has_rank1 and res.dominant_margin == 0


def test_cycle_errors():
    with pytest.raises(ValueError):
        cycle_rank1_analysis([1, 0, 1])
    with pytest.raises(ValueError):
        cycle_rank1_analysis([1, 1])


@given(st.lists(nonzero, min_size=3, max_size=9))
def test_cycle_criterion_against_certificate(ws):
    res = cycle_rank1_analysis(ws)
    g = cycle_graph_with(ws)
    best = brute_force_maxcut(g)
    if abs(res.dominant_margin) < 1e-9 and res.reason is not CycleReason.EVEN_POSITIVES:
        return
    # rank 1 exists iff some cut carries a certificate; the optimum is the only candidate
    assert res.has_rank1 == rank1_certificate(g, best.x, tol=1e-9)
    if res.has_rank1:
        assert cut_value(g, res.optimal_cut) == pytest.approx(best.value)


@given(st.lists(nonzero, min_size=3, max_size=8))
def test_cycle_cut_is_unique(ws):
    res = cycle_rank1_analysis(ws)
    if res.has_rank1 and not abs(res.dominant_margin) < 1e-9:
        assert all_maximizers(cycle_graph_with(ws)) == [res.optimal_cut]


def test_minor_determinant_examples():
    # lower-right 1x1 of -L(C3) is -(w_1 + w_2) in 0-based edge labels
    assert cycle_symmetric_minor_determinant([2, 3, 5], 1) == pytest.approx(-8)
    # C4 with all weights -1: -L restricted to vertices 2,3 is [[2,-1],[-1,2]]
    assert cycle_symmetric_minor_determinant([-1, -1, -1, -1], 2) == pytest.approx(3)
    with pytest.raises(IndexError):
        cycle_symmetric_minor_determinant([1, 1, 1], 3)
    with pytest.raises(IndexError):
        cycle_symmetric_minor_determinant([1, 1, 1], 0)


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=9))
def test_minor_determinant_matches_dense(ws):
    ws = [w if w != 0 else 1.0 for w in ws]
    n = len(ws)
    M = -laplacian(cycle_graph_with(ws))
    for m in range(1, n):
        ref = dense_det(M[n - m:, n - m:])
        got = cycle_symmetric_minor_determinant(ws, m)
        assert got == pytest.approx(ref, rel=1e-10, abs=1e-10 * max(1, np.abs(M).max()) ** m)


# ---------------------------------------------------------------- vertex sums


def _solved(g):
    sol = solve(cost_matrix(g), tol=1e-10)
    assert sol.converged
    return sol.X, sol.S


def test_compose_rank1_inputs():
    g1 = named_graph("c4")
    g2 = named_graph("c4", [1, 1, 1, 1])
    X1, S1 = _solved(g1)
    X2, S2 = _solved(g2)
    comp = compose_vertex_sum(X1, S1, X2, S2)
    x1, x2 = np.array([1, -1, 1, -1]), np.array([-1, 1, -1, 1])
    x = np.concatenate((x1, x2[1:]))
    assert np.allclose(comp.X_composed, np.outer(x, x), atol=1e-6)
    assert comp.rank_formula_value == 1 == numerical_rank(comp.X_composed)


def test_compose_butterfly_rank3():
    X, S = _solved(complete_graph(3))
    comp = compose_vertex_sum(X, S, X, S)
    C = cost_matrix(named_graph("butterfly"))
    assert check_optimality(C, comp.X_composed, comp.S_composed, 1e-6).ok
    assert numerical_rank(comp.X_composed) == comp.rank_formula_value == 3
    assert np.allclose(comp.S_composed, pad_sum(S, S, 1))


def test_compose_with_single_vertex():
    X1, S1 = _solved(named_graph("c5", [1, -2, 3, 1, 1]))
    comp = compose_vertex_sum(X1, S1, np.ones((1, 1)), np.zeros((1, 1)))
    assert np.array_equal(comp.X_composed, X1) and np.allclose(comp.S_composed, S1)


def test_compose_block_layout():
    X1, S1 = _solved(complete_graph(3))
    X2, S2 = _solved(named_graph("c4", [1, -1, 2, 1]))
    X = compose_vertex_sum(X1, S1, X2, S2).X_composed
    assert np.array_equal(X[:3, :3], X1) and np.array_equal(X[2:, 2:], X2)
    assert np.allclose(X[:2, 3:], np.outer(X1[:2, 2], X2[1:, 0]))


def test_compose_preconditions():
    X, S = _solved(complete_graph(3))
    with pytest.raises(PreconditionError):
        compose_vertex_sum(np.eye(3), S, X, S)
    with pytest.raises(ValueError):
        compose_vertex_sum(X, S[:2, :2], X, S)


def test_min_rank_examples():
    X1, _ = _solved(named_graph("c4"))
    Xk, _ = _solved(complete_graph(3))
    assert vertex_sum_min_rank_exists(X1, X1) == 1
    assert vertex_sum_min_rank_exists(Xk, X1) == 2
    assert vertex_sum_min_rank_exists(Xk, Xk) == 2
    Xc = vertex_sum_low_rank_completion(Xk, Xk)
    C = cost_matrix(named_graph("butterfly"))
    X3, _ = _solved(named_graph("butterfly"))
    assert numerical_rank(Xc) == 2 and numerical_rank(X3) == 3
    assert np.sum(C * Xc) == pytest.approx(np.sum(C * X3), abs=1e-7)


@pytest.mark.parametrize("seed", range(15))
def test_vertex_sum_random(seed):
    gen = stream(seed, 3)
    g1 = random_weighted_graph(2 + seed % 5, gen)
    g2 = random_weighted_graph(2 + (seed * 7) % 5, gen)
    vs = vertex_sum(CliqueSumSpec(g1, g2, (g1.n - 1,), (0,)))
    X1, S1 = _solved(g1)
    X2, S2 = _solved(g2)
    comp = compose_vertex_sum(X1, S1, X2, S2)
    assert check_optimality(cost_matrix(vs.graph), comp.X_composed, comp.S_composed, 1e-6).ok
    assert numerical_rank(comp.X_composed) == comp.rank_formula_value


# ---------------------------------------------------------------- diamonds

W_ALIGNED = (1, 1, 1 / 3, 1, 1)
W_FLIPPED = (1, 1 / 3, 10, 1, 1 / 3)
# aligned cut optimal although w23 exceeds min(h1, h2)
W_GAP = (1, 100, 1.02, 1, 100)


def _diamond(w):
    return named_graph("diamond", w)


def test_diamond_aligned_example():
    res = diamond_analysis(_diamond(W_ALIGNED))
    assert res.regime is DiamondRegime.ALIGNED is res.stated_regime
    assert res.x_star == (-1, 1, 1, -1)
    assert rank1_certificate(_diamond(W_ALIGNED), res.x_star)


def test_diamond_flipped_example():
    g = _diamond(W_FLIPPED)
    res = diamond_analysis(g)
    assert res.regime is DiamondRegime.FLIPPED is res.stated_regime
    assert res.x_star == (1, -1, 1, 1)
    assert res.condition_rhs == pytest.approx(1.0)
    assert cut_value(g, res.x_star) == brute_force_maxcut(g).value


def test_diamond_equal_weights_fail_precondition():
    with pytest.raises(PreconditionError):
        diamond_analysis(_diamond((1, 1, 1, 1, 1)))
    res = diamond_analysis(_diamond((1, 1, 1, 1, 1)), check_precondition=False)
    assert res.stated_regime is DiamondRegime.NEITHER
    assert res.regime is DiamondRegime.ALIGNED  # w23 = h1 + h2 exactly
    assert not res.precondition_met


def test_diamond_gap_case():
    g = _diamond(W_GAP)
    res = diamond_analysis(g)
    assert res.stated_regime is DiamondRegime.NEITHER
    assert res.regime is DiamondRegime.ALIGNED
    assert (1, -1, -1, 1) in all_maximizers(g)
    assert rank1_certificate(g, (-1, 1, 1, -1))


def test_diamond_rejects_bad_input():
    with pytest.raises(PreconditionError):
        diamond_analysis(_diamond((1, -1, 1, 1, 1)))
    with pytest.raises(PreconditionError):
        diamond_analysis(complete_graph(4))


@pytest.mark.parametrize("w", [W_ALIGNED, W_FLIPPED, W_GAP])
def test_diamond_dual_certificate(w):
    g = _diamond(w)
    res = diamond_analysis(g)
    x = np.array(res.x_star)
    C = cost_matrix(g)
    assert check_optimality(C, np.outer(x, x), res.S_star, 1e-9).ok
    assert np.allclose(res.S_star @ x, 0, atol=1e-12)
    off = ~np.eye(4, dtype=bool)
    assert np.allclose(res.S_star[off], -C[off])
    # the unique such dual is the certificate dual of the cut
    assert np.allclose(res.S_star, certificate_dual(g, x))


def test_diamond_dual_is_padded_triangles_minus_shared_edge():
    g = _diamond(W_FLIPPED)
    x = (1, -1, 1, 1)
    t1 = g.induced([0, 1, 2])
    t2 = g.induced([1, 2, 3])
    S = pad_sum(certificate_dual(t1, x[:3]), certificate_dual(t2, x[1:]), 2)
    w23 = g.weight(1, 2)
    # the shared edge is cut, so each triangle dual holds (w23/4) J on it
    S[1:3, 1:3] -= 0.25 * w23 * np.ones((2, 2))
    assert np.allclose(S, diamond_dual(g, x))


def test_flipped_minor_determinant_examples():
    g = _diamond((2.0,) * 5)
    # x = +1 everywhere: leading 3x3 of -L = 2 [[-2,1,1],[1,-3,1],[1,1,-3]]
    assert diamond_flipped_minor_determinant(g, (1, 1, 1, 1)) == pytest.approx(-8 * 8)
    g0 = named_graph("diamond", (1.5, 0.7, 0.0, 2.0, 0.4))
    M = laplacian(signed_graph(g0, (1, -1, 1, 1)))[:3, :3]
    assert diamond_flipped_minor_determinant(g0, (1, -1, 1, 1)) == pytest.approx(dense_det(M))


def _expanded(w12, w13, w23, w24, w34):
    # expansion for x = (1, -1, 1, 1), derived symbolically
    return (-w12 * w13 * w24 + w12 * w13 * w34 + w12 * w23 * w24 - w12 * w23 * w34
            - w12 * w24 * w34 - w13 * w23 * w24 + w13 * w23 * w34 + w13 * w24 * w34)


@given(st.lists(st.floats(-4, 4), min_size=5, max_size=5), st.tuples(*[st.sampled_from([-1, 1])] * 4))
def test_flipped_minor_determinant_dense(w, x):
    g = named_graph("diamond", w)
    M = laplacian(signed_graph(g, x))[:3, :3]
    got = diamond_flipped_minor_determinant(g, x)
    assert got == pytest.approx(dense_det(M), rel=1e-12, abs=1e-9)
    if x == (1, -1, 1, 1):
        assert got == pytest.approx(_expanded(*w), rel=1e-12, abs=1e-9)


def _normalized(c):
    return c if c[0] == 1 else tuple(-v for v in c)


@pytest.mark.parametrize("seed", range(40))
def test_diamond_regime_equivalence(seed):
    gen = stream(seed, 11)
    w = np.abs(gen.standard_normal(5)) + 1e-3
    g = _diamond(w)
    try:
        res = diamond_analysis(g)
    except PreconditionError:
        return
    best = set(all_maximizers(g))
    aligned_ok = (1, -1, -1, 1) in best and rank1_certificate(g, (-1, 1, 1, -1))
    flipped = [c for c in itertools.product((-1, 1), repeat=4) if c[1] == -1 and c[2] == 1]
    flipped_ok = any(_normalized(c) in best and rank1_certificate(g, c) for c in flipped)
    assert (res.regime is DiamondRegime.ALIGNED) == aligned_ok
    assert (res.regime is DiamondRegime.FLIPPED) == (flipped_ok and not aligned_ok)
