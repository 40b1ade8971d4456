"""Monotone coupling from the past for the WRC flipping dynamics.

The grand coupling ``phi(X, U)`` consumes fixed-shape randomness records
U = (lazy bit, edge, value bit, uniform real): a lazy record holds, otherwise
edge ``e`` is set to ``b`` and accepted iff ``r < min(1, ratio)``.  Records
for times -1, -2, ... live on a backward-growing tape; once drawn, a record
never changes across doubling rounds, which is what makes replaying rounds
from ever-earlier start times consistent.

Coalescence of the two bounding chains (all-empty and all-full starts) under
the shared tape yields an exactly stationary sample.  The fast path lives in
the kernel backend; :func:`cftp_sample_checked` is a pure-Python twin that
additionally asserts the sandwich invariants and is compared bit-for-bit
against the kernel in the tests.

Each record always draws all four components, even when the lazy bit makes
the rest unused: the record must be a pure function of (seed, index) so both
bounding chains and any sandwiched chain read identical randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import impl
from . import _kernel_py as _ref
from .dynamics import p_r_to_i
from .model import (EdgeSubset, SpinConfig, WeightedGraph, WrcParams,
                    params_from_ising)
from .rng import RngStream


class CoalescenceFailure(RuntimeError):
    """The bounding chains did not coalesce within the step budget."""


@dataclass(frozen=True)
class RandomnessRecord:
    lazy: int
    edge: int
    bit: int
    r: float


class RandomnessTape:
    """Lazily generated records for times t = -1, -2, ...

    Record index j corresponds to time t = -(j+1).  The draw protocol matches
    the kernels exactly: lazy bit, edge by rejection, value bit, real.
    """

    def __init__(self, seed: int, m: int):
        self._rng = RngStream(seed)
        self._m = m
        self._records: list[RandomnessRecord] = []

    def record(self, t: int) -> RandomnessRecord:
        if t > -1:
            raise ValueError("tape indices are negative times")
        j = -t - 1
        while len(self._records) <= j:
            lazy = self._rng.bit()
            edge = self._rng.below(self._m)
            bit = self._rng.bit()
            r = self._rng.uniform()
            self._records.append(RandomnessRecord(lazy, edge, bit, r))
        return self._records[j]

    @property
    def draws_consumed(self) -> int:
        return self._rng.counter

    def __len__(self) -> int:
        return len(self._records)


def phi(g: WeightedGraph, w: WrcParams, state: EdgeSubset,
        rec: RandomnessRecord) -> EdgeSubset:
    """One grand-coupling update; returns a new state, deterministic in
    (state, record)."""
    return _ref.phi_apply(g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e,
                          w.p, np.log(w.lam), state,
                          rec.lazy, rec.edge, rec.bit, rec.r)


@dataclass
class CftpResult:
    subset: EdgeSubset
    tstar: int          # steps of the coalescing round
    draws: int          # RNG counter after the run


def cftp_sample_detailed(g: WeightedGraph, w: WrcParams, seed: int,
                         max_doubling: int = 30) -> CftpResult:
    """Perfect WRC sample plus coalescence data (kernel fast path)."""
    if g.m == 0:
        return CftpResult(np.zeros(0, dtype=np.uint8), 0, 0)
    state, tstar, counter = impl.cftp_run(
        g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, w.p, np.log(w.lam),
        seed & ((1 << 64) - 1), max_doubling)
    if tstar < 0:
        raise CoalescenceFailure(
            f"no coalescence by T = 2^{max_doubling} (seed {seed})")
    return CftpResult(state, tstar, counter)


def cftp_sample(g: WeightedGraph, w: WrcParams, seed: int,
                max_doubling: int = 30) -> EdgeSubset:
    """A perfect sample from the WRC distribution."""
    return cftp_sample_detailed(g, w, seed, max_doubling).subset


def cftp_sample_checked(g: WeightedGraph, w: WrcParams, seed: int,
                        max_doubling: int = 30, sandwich_chains: int = 0,
                        sandwich_seed: int = 0) -> CftpResult:
    """Reference CFTP with invariant checking.

    Asserts the bounding order X_min <= X_max after every step of every
    round, plus (optionally) that ``sandwich_chains`` extra chains started
    from fixed random states at time -T stay between the bounds.  Raises
    AssertionError on any violation.  Output is bit-identical to
    :func:`cftp_sample_detailed`.
    """
    if g.m == 0:
        return CftpResult(np.zeros(0, dtype=np.uint8), 0, 0)
    tape = RandomnessTape(seed, g.m)
    extras = []
    if sandwich_chains:
        gen = np.random.default_rng(sandwich_seed)
        extras = [gen.integers(0, 2, size=g.m).astype(np.uint8)
                  for _ in range(sandwich_chains)]
    t_cap = 1
    for _ in range(max_doubling + 1):
        tape.record(-t_cap)  # extend up front: records precede the replay
        xmin = np.zeros(g.m, dtype=np.uint8)
        xmax = np.ones(g.m, dtype=np.uint8)
        mids = [x.copy() for x in extras]
        for t in range(-t_cap, 0):
            rec = tape.record(t)
            xmin = phi(g, w, xmin, rec)
            xmax = phi(g, w, xmax, rec)
            assert np.all(xmin <= xmax), "bounding chains out of order"
            for i, mid in enumerate(mids):
                mids[i] = phi(g, w, mid, rec)
                assert np.all(xmin <= mids[i]) and np.all(mids[i] <= xmax), \
                    "sandwiched chain escaped the bounds"
        if np.array_equal(xmin, xmax):
            return CftpResult(xmin, t_cap, tape.draws_consumed)
        t_cap *= 2
    raise CoalescenceFailure(f"no coalescence by T = 2^{max_doubling} (seed {seed})")


def perfect_ising_sample_detailed(g: WeightedGraph, seed: int,
                                  max_doubling: int = 30) -> tuple[SpinConfig, CftpResult]:
    """Perfect Ising sample: perfect WRC sample, then one edges-to-spins
    resampling continuing the same random stream."""
    w, _ = params_from_ising(g)
    res = cftp_sample_detailed(g, w, seed, max_doubling)
    rng = RngStream(seed, res.draws)
    spins = p_r_to_i(g, w, res.subset, rng)
    return spins, CftpResult(res.subset, res.tstar, rng.counter)


def perfect_ising_sample(g: WeightedGraph, seed: int,
                         max_doubling: int = 30) -> SpinConfig:
    return perfect_ising_sample_detailed(g, seed, max_doubling)[0]


def check_monotone(g: WeightedGraph, w: WrcParams, trials: int,
                   seed: int) -> int:
    """Random comparable pairs and records through phi; returns the number
    of order violations (zero for a monotone coupling)."""
    if g.m == 0:
        return 0
    violations, _ = impl.monotone_trials(
        g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, w.p, np.log(w.lam),
        trials, seed & ((1 << 64) - 1))
    return int(violations)
