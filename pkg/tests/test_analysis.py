import math

import numpy as np
import pytest

from wrcsampler import CapExceeded, ChainKind, params_from_ising, perturb_sg
from wrcsampler.analysis import (ChainMatrix, build_matrix,
                                 empirical_mixing_time, half_step_matrices,
                                 reversibility_residual, spectral,
                                 stationarity_residual, tv_distance,
                                 verify_adjointness, verify_gap_inequalities,
                                 verify_perturbation_bounds)
from wrcsampler.graphs import complete_graph, k2, path_graph

from conftest import make_instances

ALL_KINDS = [ChainKind.EF_WRC, ChainKind.EF_SG, ChainKind.SINGLE_BOND,
             ChainKind.SW_ISING, ChainKind.SW_WRC]


def _params_for(g, kind):
    w, s = params_from_ising(g)
    return s if kind == ChainKind.EF_SG else w


def test_ef_wrc_k2_matrix_and_gap(g_k2):
    w, _ = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.EF_WRC, g_k2, w)
    assert np.allclose(cm.P, [[0.75, 0.25], [0.5, 0.5]], atol=1e-15)
    assert spectral(cm).gap == pytest.approx(0.75, abs=1e-12)


def test_sw_is_product_of_half_steps(g_k2):
    w, _ = params_from_ising(g_k2)
    p_ir, p_ri = half_step_matrices(g_k2, w)
    sw_wrc = build_matrix(ChainKind.SW_WRC, g_k2, w)
    assert np.allclose(sw_wrc.P, p_ri @ p_ir, atol=1e-15)
    sw_i = build_matrix(ChainKind.SW_ISING, g_k2, w)
    assert np.allclose(sw_i.P, p_ir @ p_ri, atol=1e-15)


def test_rows_sum_to_one_and_stationarity():
    for g in make_instances(7, 12, n_max=4, m_max=6):
        for kind in ALL_KINDS:
            cm = build_matrix(kind, g, _params_for(g, kind))
            assert np.abs(cm.P.sum(axis=1) - 1.0).max() <= 1e-12
            assert np.all(cm.P >= -1e-15)
            assert stationarity_residual(cm) <= 1e-10, (kind,)


def test_reversibility_ef_sb_sw():
    for g in make_instances(13, 12, n_max=4, m_max=6):
        for kind in ALL_KINDS:
            cm = build_matrix(kind, g, _params_for(g, kind))
            assert reversibility_residual(cm) <= 1e-10, (kind,)


def test_ef_sg_detailed_balance_with_zero_penalties(g_k2):
    # lam = 1 everywhere: zero-weight states make both flow sides vanish
    _, s = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.EF_SG, g_k2, s)
    assert reversibility_residual(cm) <= 1e-12


def test_lazy_chains_are_psd():
    for g in make_instances(19, 8, n_max=4, m_max=5):
        for kind in (ChainKind.EF_WRC, ChainKind.SINGLE_BOND):
            rep = spectral(build_matrix(kind, g, _params_for(g, kind)))
            assert rep.eigenvalue_min >= -1e-9


def test_adjointness_identity():
    for g in make_instances(29, 15, n_max=4, m_max=6) + [k2(), path_graph(3)]:
        rec = verify_adjointness(g)
        assert rec["pass"], rec
        assert rec["residual"] <= 1e-10


def test_gap_inequalities_k2_and_random(g_k2):
    rec = verify_gap_inequalities(g_k2)
    assert rec["pass"], rec
    assert rec["gaps"]["ef"] == pytest.approx(0.75, abs=1e-12)
    for g in make_instances(37, 15, n_max=4, m_max=6):
        rec = verify_gap_inequalities(g)
        assert rec["pass"], rec


def test_perturbation_all_unit_fields():
    g = complete_graph(3, beta=2.0, lam=1.0)
    rec = verify_perturbation_bounds(g)
    assert rec["pass"], rec


def test_perturbation_identity_when_thresholds_cleared():
    # every eta above 1/n: the perturbed model is the model itself
    g = complete_graph(4, beta=2.0, lam=0.2)  # eta = 2/3 > 1/4
    _, s = params_from_ising(g)
    assert np.array_equal(perturb_sg(s, g.n).eta, s.eta)
    rec = verify_perturbation_bounds(g)
    assert rec["pass"]
    ratios = rec["checks"][0]
    assert ratios["lhs"] == pytest.approx(1.0, abs=1e-14)
    assert ratios["rhs"] == pytest.approx(1.0, abs=1e-14)
    tr = rec["checks"][1]
    assert tr["lhs"] == pytest.approx(1.0, abs=1e-14)
    assert tr["rhs"] == pytest.approx(1.0, abs=1e-14)


def test_perturbation_random_sweep():
    for g in make_instances(43, 15, n_max=4, m_max=6, unit_field_share=0.5):
        rec = verify_perturbation_bounds(g)
        assert rec["pass"], rec


def test_tv_distance_examples():
    assert tv_distance(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0
    assert tv_distance(np.array([2 / 3, 1 / 3]), np.array([0.5, 0.5])) == pytest.approx(1 / 6)
    assert tv_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    with pytest.raises(ValueError):
        tv_distance(np.array([1.0]), np.array([0.5, 0.5]))


def test_mixing_time_k2(g_k2):
    w, _ = params_from_ising(g_k2)
    rec = empirical_mixing_time(ChainKind.EF_WRC, g_k2, w, eps=0.25)
    assert rec["t_mix"] == 1
    assert rec["spectral_bound"] == pytest.approx((math.log(3.0) + math.log(4.0)) / 0.75)
    assert rec["pass"]
    rec = empirical_mixing_time(ChainKind.EF_WRC, g_k2, w, eps=1.0)
    assert rec["t_mix"] == 0


def test_mixing_time_below_bound_random():
    for g in make_instances(53, 8, n_max=4, m_max=5):
        for kind in (ChainKind.EF_WRC, ChainKind.SW_ISING):
            rec = empirical_mixing_time(kind, g, _params_for(g, kind), eps=0.25)
            assert rec["t_mix"] <= rec["spectral_bound"], rec


def test_spectral_restricts_to_support(g_k2):
    # all penalties zero: only the even subgraphs carry mass, and the chain
    # restricted to them is the identity here
    _, s = params_from_ising(g_k2)
    cm = build_matrix(ChainKind.EF_SG, g_k2, s)
    assert cm.pi[1] == 0.0
    rep = spectral(cm)
    assert rep.gap == 1.0  # single-state support


def test_spectral_rejects_non_reversible():
    P = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    pi = np.full(3, 1.0 / 3.0)
    with pytest.raises(ValueError, match="reversible"):
        spectral(ChainMatrix(ChainKind.EF_WRC, 0, P, pi))


def test_state_cap_enforced():
    g = path_graph(5)
    w, _ = params_from_ising(g)
    with pytest.raises(CapExceeded):
        build_matrix(ChainKind.EF_WRC, g, w, cap=8)
