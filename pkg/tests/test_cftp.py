import numpy as np
import pytest

from wrcsampler import (CoalescenceFailure, RandomnessRecord, RandomnessTape,
                        WeightedGraph, WrcParams, cftp_sample,
                        cftp_sample_checked, cftp_sample_detailed,
                        check_monotone, params_from_ising,
                        perfect_ising_sample, perfect_ising_sample_detailed,
                        phi, int_from_bits)
from wrcsampler.analysis import tv_distance
from wrcsampler.exact import enumerate_ising, enumerate_wrc
from wrcsampler.graphs import k2

from conftest import make_instances


def test_phi_lazy_and_same_bit(g_k2):
    w, _ = params_from_ising(g_k2)
    for start in (0, 1):
        x = np.array([start], dtype=np.uint8)
        out = phi(g_k2, w, x, RandomnessRecord(lazy=0, edge=0, bit=1 - start, r=0.0))
        assert out[0] == start  # lazy records hold
        out = phi(g_k2, w, x, RandomnessRecord(lazy=1, edge=0, bit=start, r=0.99))
        assert out[0] == start  # proposing the current value never moves


def test_phi_acceptance_threshold(g_k2):
    # adding the K2 edge from empty has ratio 1/2
    w, _ = params_from_ising(g_k2)
    empty = np.zeros(1, dtype=np.uint8)
    out = phi(g_k2, w, empty, RandomnessRecord(lazy=1, edge=0, bit=1, r=0.4))
    assert out[0] == 1
    out = phi(g_k2, w, empty, RandomnessRecord(lazy=1, edge=0, bit=1, r=0.6))
    assert out[0] == 0
    # threshold is strict: r equal to the ratio rejects
    out = phi(g_k2, w, empty, RandomnessRecord(lazy=1, edge=0, bit=1, r=0.5))
    assert out[0] == 0


def test_phi_does_not_mutate_input(g_k2):
    w, _ = params_from_ising(g_k2)
    x = np.zeros(1, dtype=np.uint8)
    phi(g_k2, w, x, RandomnessRecord(lazy=1, edge=0, bit=1, r=0.0))
    assert x[0] == 0


def test_tape_records_are_stable():
    tape = RandomnessTape(31337, m=5)
    first = [tape.record(t) for t in range(-1, -9, -1)]
    # regrowing or re-reading never changes a record
    tape.record(-64)
    again = [tape.record(t) for t in range(-1, -9, -1)]
    assert first == again
    fresh = RandomnessTape(31337, m=5)
    fresh.record(-64)
    assert [fresh.record(t) for t in range(-1, -9, -1)] == first


def test_tape_fixed_record_shape():
    # every record consumes at least its four components, lazy or not
    tape = RandomnessTape(5, m=3)
    consumed = []
    for t in range(-1, -21, -1):
        tape.record(t)
        consumed.append(tape.draws_consumed)
    diffs = np.diff([0] + consumed)
    assert np.all(diffs >= 4)
    assert any(tape.record(t).lazy == 0 for t in range(-1, -21, -1))


def test_cftp_deterministic_and_checked_matches_backend(g_k2):
    w, _ = params_from_ising(g_k2)
    a = cftp_sample_detailed(g_k2, w, 7)
    b = cftp_sample_detailed(g_k2, w, 7)
    assert np.array_equal(a.subset, b.subset) and a.tstar == b.tstar and a.draws == b.draws
    for seed in range(120):
        fast = cftp_sample_detailed(g_k2, w, seed)
        ref = cftp_sample_checked(g_k2, w, seed)
        assert np.array_equal(fast.subset, ref.subset)
        assert fast.tstar == ref.tstar
        assert fast.draws == ref.draws


def test_cftp_checked_on_random_instances():
    for idx, g in enumerate(make_instances(91, 6, n_max=5, m_max=5)):
        w, _ = params_from_ising(g)
        for seed in range(20):
            fast = cftp_sample_detailed(g, w, seed)
            ref = cftp_sample_checked(g, w, seed, sandwich_chains=10,
                                      sandwich_seed=idx)
            assert np.array_equal(fast.subset, ref.subset)
            assert fast.tstar == ref.tstar


def test_cftp_distribution_quick(g_k2):
    w, _ = params_from_ising(g_k2)
    n = 4000
    counts = np.zeros(2)
    for seed in range(n):
        counts[int(cftp_sample(g_k2, w, seed)[0])] += 1
    exact = enumerate_wrc(g_k2, w).probs
    assert tv_distance(counts / n, exact) < 0.03


def test_cftp_abort_reports_non_coalescence(g_k2):
    w, _ = params_from_ising(g_k2)
    # seed 7 needs T* = 8 on K2, so a budget of T <= 1 must abort
    assert cftp_sample_detailed(g_k2, w, 7).tstar == 8
    with pytest.raises(CoalescenceFailure):
        cftp_sample_detailed(g_k2, w, 7, max_doubling=0)
    with pytest.raises(CoalescenceFailure):
        cftp_sample_checked(g_k2, w, 7, max_doubling=0)


def test_perfect_ising_k2_distribution(g_k2):
    n = 6000
    counts = np.zeros(4)
    for seed in range(n):
        counts[int_from_bits(perfect_ising_sample(g_k2, seed))] += 1
    exact = enumerate_ising(g_k2).probs
    assert tv_distance(counts / n, exact) < 0.03
    # no-field symmetry: the distribution is invariant under a global flip
    assert abs(counts[0] - counts[3]) / n < 0.03
    assert abs(counts[1] - counts[2]) / n < 0.03


def test_perfect_ising_edgeless_graph():
    g = WeightedGraph(3, [], [0.5, 0.25, 1.0], [])
    n = 8000
    ones = np.zeros(3)
    for seed in range(n):
        ones += perfect_ising_sample(g, seed)
    expect = g.lam / (1.0 + g.lam)
    assert np.abs(ones / n - expect).max() < 0.02


def test_perfect_ising_detailed_reports_draws(g_k2):
    spins, info = perfect_ising_sample_detailed(g_k2, 3)
    assert spins.shape == (2,)
    assert info.draws > 0 and info.tstar >= 1


def test_check_monotone_zero_violations():
    for g in make_instances(101, 6, n_max=8, m_max=12):
        w, _ = params_from_ising(g)
        assert check_monotone(g, w, 20000, seed=5) == 0


def test_monotone_edge_case_b1_tau_has_edge(g_k2):
    # when the proposal writes a 1 the upper state already has, the upper
    # chain cannot move below the lower one whatever r does
    w, _ = params_from_ising(g_k2)
    tau = np.ones(1, dtype=np.uint8)
    for r in (0.0, 0.5, 0.999):
        rec = RandomnessRecord(lazy=1, edge=0, bit=1, r=r)
        assert phi(g_k2, w, tau, rec)[0] == 1


def test_cftp_empty_graph():
    g = WeightedGraph(2, [], [0.5, 0.5], [])
    w = WrcParams(p=np.ones(0), lam=g.lam)
    res = cftp_sample_detailed(g, w, 0)
    assert res.subset.shape == (0,) and res.tstar == 0
