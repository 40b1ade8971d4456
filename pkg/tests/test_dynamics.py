import math

import numpy as np
import pytest

from wrcsampler import (ChainKind, RngStream, params_from_ising, run_chain,
                        bits_from_int, int_from_bits, p_i_to_r, p_r_to_i,
                        ef_step, sb_step, sw_step)
from wrcsampler.analysis import build_matrix
from wrcsampler.exact import enumerate_wrc
from wrcsampler.graphs import k2

from conftest import make_instances


def empirical_row(g, params, kind, start_int, n_trials, seed):
    """One-step outcome frequencies from a fixed start."""
    width = g.n if kind == ChainKind.SW_ISING else g.m
    counts = np.zeros(1 << width)
    for i in range(n_trials):
        state = bits_from_int(start_int, width)
        rng = RngStream(seed + i)
        run_chain(g, params, kind, state, 1, rng)
        counts[int_from_bits(state)] += 1
    return counts / n_trials


@pytest.mark.parametrize("kind", [ChainKind.EF_WRC, ChainKind.SINGLE_BOND,
                                  ChainKind.SW_ISING, ChainKind.SW_WRC])
def test_single_step_matches_matrix_row(g_k2, kind):
    w, _ = params_from_ising(g_k2)
    cm = build_matrix(kind, g_k2, w)
    n_trials = 40000
    for start in range(cm.size):
        freq = empirical_row(g_k2, w, kind, start, n_trials, seed=1000 * start)
        assert np.abs(freq - cm.P[start]).max() < 0.012, (kind, start, freq, cm.P[start])


def test_ef_step_spot_probabilities(g_k2):
    # P(empty -> {e}) = 1/2 * min(1, 1/2) = 1/4 ; P({e} -> empty) = 1/2
    w, _ = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.EF_WRC, g_k2, w)
    assert cm.P[0, 1] == pytest.approx(0.25)
    assert cm.P[1, 0] == pytest.approx(0.5)


def test_sb_step_spot_probabilities(g_k2):
    # disconnected case: (1/2) * p * (1+1)/(2*2) = 1/8, which also satisfies
    # the entrywise comparison P_SB >= P_EF / 3 here: 1/8 >= (1/4)/3
    w, _ = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.SINGLE_BOND, g_k2, w)
    assert cm.P[0, 1] == pytest.approx(1.0 / 8.0)
    assert cm.P[0, 1] >= 0.25 / 3.0
    # connected case: inclusion probability is exactly p_e
    assert cm.P[1, 1] == pytest.approx(0.5 + 0.5 * w.p[0])


def test_sw_one_step_branch_enumeration(g_k2):
    # From sigma = (0,0) on K2 (beta=2, lam=1): I->R keeps the edge w.p. 1/2;
    # R->I flips fair coins per component.  Hand enumeration of the branches:
    w, _ = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.SW_ISING, g_k2, w)
    expected = np.array([3.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0])
    assert np.allclose(cm.P[0], expected, atol=1e-14)
    freq = empirical_row(g_k2, w, ChainKind.SW_ISING, 0, 40000, seed=9)
    assert np.abs(freq - expected).max() < 0.012


def test_p_i_to_r_cases(g_k2, g_triangle):
    w, _ = params_from_ising(g_k2)
    rng = RngStream(5)
    # bichromatic spins leave no candidate edges
    for _ in range(20):
        sub = p_i_to_r(g_k2, w, np.array([0, 1], dtype=np.uint8), rng)
        assert sub[0] == 0
    # monochromatic K2: Bernoulli(1/2)
    hits = sum(int(p_i_to_r(g_k2, w, np.zeros(2, dtype=np.uint8), rng)[0])
               for _ in range(20000))
    assert abs(hits / 20000 - 0.5) < 0.015
    # constant spins on a triangle: all three edges w.p. 1/8
    wt, _ = params_from_ising(g_triangle)
    all3 = sum(int(p_i_to_r(g_triangle, wt, np.zeros(3, dtype=np.uint8), rng).all())
               for _ in range(20000))
    assert abs(all3 / 20000 - 0.125) < 0.012


def test_p_r_to_i_cases(g_k2):
    w, _ = params_from_ising(g_k2)
    rng = RngStream(6)
    # single component with lambda-product 1: fair coin
    ones = sum(int(p_r_to_i(g_k2, w, np.array([1], dtype=np.uint8), rng)[0])
               for _ in range(20000))
    assert abs(ones / 20000 - 0.5) < 0.015
    # singleton component with lambda = 1/3: Pr[1] = 1/4
    g3 = k2(beta=2.0, lam=1.0 / 3.0)
    w3, _ = params_from_ising(g3)
    ones = sum(int(p_r_to_i(g3, w3, np.array([0], dtype=np.uint8), rng)[0])
               for _ in range(20000))
    assert abs(ones / 20000 - 0.25) < 0.015


def test_run_chain_zero_steps_and_determinism(g_triangle):
    w, _ = params_from_ising(g_triangle)
    state = np.array([1, 0, 1], dtype=np.uint8)
    out, _ = run_chain(g_triangle, w, ChainKind.EF_WRC, state.copy(), 0, RngStream(3))
    assert np.array_equal(out, state)

    runs = []
    for _ in range(2):
        rng = RngStream(42)
        st, trace = run_chain(g_triangle, w, ChainKind.EF_WRC,
                              np.zeros(3, dtype=np.uint8), 500, rng, trace_stride=10)
        runs.append((st.copy(), trace.copy(), rng.counter))
    assert np.array_equal(runs[0][0], runs[1][0])
    assert np.array_equal(runs[0][1], runs[1][1])
    assert runs[0][2] == runs[1][2]
    assert runs[0][1].shape == (50, 3)


def test_run_chain_chunked_equals_single(g_triangle):
    w, s = params_from_ising(g_triangle)
    for kind, params in [(ChainKind.EF_WRC, w), (ChainKind.SINGLE_BOND, w),
                         (ChainKind.SW_WRC, w), (ChainKind.SW_ISING, w)]:
        width = g_triangle.n if kind == ChainKind.SW_ISING else g_triangle.m
        a = np.zeros(width, dtype=np.uint8)
        b = np.zeros(width, dtype=np.uint8)
        rng_a = RngStream(7)
        run_chain(g_triangle, params, kind, a, 200, rng_a)
        rng_b = RngStream(7)
        for _ in range(4):
            run_chain(g_triangle, params, kind, b, 50, rng_b)
        assert np.array_equal(a, b), kind
        assert rng_a.counter == rng_b.counter


def test_single_step_wrappers_advance_state(g_k2):
    w, s = params_from_ising(g_k2)
    rng = RngStream(1)
    st = np.zeros(1, dtype=np.uint8)
    for _ in range(50):
        ef_step(g_k2, w, st, rng)
        sb_step(g_k2, w, st, rng)
        sw_step(g_k2, w, st, ChainKind.SW_WRC, rng)
    spins = np.zeros(2, dtype=np.uint8)
    sw_step(g_k2, w, spins, ChainKind.SW_ISING, rng)


def test_long_run_occupancy_matches_stationary(g_k2):
    w, _ = params_from_ising(g_k2)
    rng = RngStream(2024)
    _, trace = run_chain(g_k2, w, ChainKind.EF_WRC, np.zeros(1, dtype=np.uint8),
                         200000, rng, trace_stride=1)
    freq_empty = float((trace[:, 0] == 0).mean())
    assert abs(freq_empty - 2.0 / 3.0) < 0.01


def test_wrc_flip_ratio_bounds():
    # With stored edge parameter q (= the identity's "2p"):
    #   q/(2(1-q)) <= pi(Z+e)/pi(Z) <= q/(1-q).
    for g in make_instances(71, 20, n_max=5, m_max=7):
        w, _ = params_from_ising(g)
        dist = enumerate_wrc(g, w)
        for z in range(1 << g.m):
            for e in range(g.m):
                if z >> e & 1:
                    continue
                ratio = math.exp(dist.log_weights[z | (1 << e)] - dist.log_weights[z])
                base = w.p[e] / (1.0 - w.p[e])
                assert base / 2.0 - 1e-12 <= ratio <= base + 1e-12


def test_merge_factor_algebra():
    # (1+xy)/((1+x)(1+y)) is monotone decreasing in each argument on (0, 1]
    gen = np.random.default_rng(8)
    f = lambda x, y: (1.0 + x * y) / ((1.0 + x) * (1.0 + y))
    for _ in range(2000):
        x, y = gen.uniform(1e-6, 1.0, size=2)
        xp = gen.uniform(1e-6, 1.0) * x
        yp = gen.uniform(1e-6, 1.0) * y
        assert f(x, y) <= f(xp, yp) + 1e-15
        assert 0.5 - 1e-15 <= f(x, y) <= 1.0 + 1e-15


def test_ef_sg_zero_penalty_behaviour(g_k2):
    _, s = params_from_ising(g_k2)  # lam = 1 so eta = 0
    # start at an even subgraph: stays within even subgraphs forever
    st = np.zeros(1, dtype=np.uint8)
    run_chain(g_k2, s, ChainKind.EF_SG, st, 200, RngStream(4))
    assert st[0] == 0
    # a non-even start is flagged as non-ergodic
    with pytest.raises(ValueError, match="non-ergodic"):
        run_chain(g_k2, s, ChainKind.EF_SG, np.ones(1, dtype=np.uint8), 1, RngStream(4))


def test_ef_sg_matches_matrix_row():
    g = k2(beta=2.0, lam=1.0 / 3.0)
    _, s = params_from_ising(g)
    cm = build_matrix(ChainKind.EF_SG, g, s)
    freq = empirical_row(g, s, ChainKind.EF_SG, 0, 40000, seed=13)
    assert np.abs(freq - cm.P[0]).max() < 0.012


def test_edgeless_graph_runs():
    from wrcsampler import WeightedGraph, WrcParams
    g = WeightedGraph(3, [], [0.5, 1.0, 0.25], [])
    w = WrcParams(p=np.ones(0), lam=g.lam)
    st = np.zeros(0, dtype=np.uint8)
    out, _ = run_chain(g, w, ChainKind.EF_WRC, st, 10, RngStream(0))
    assert out.shape == (0,)
    spins = np.zeros(3, dtype=np.uint8)
    out, _ = run_chain(g, w, ChainKind.SW_ISING, spins, 5, RngStream(0))
    assert out.shape == (3,)
