"""The four Markov chains as single-step kernels and batched runs.

Chains and their state types:

* ``EF_WRC``      edge flipping (lazy Metropolis) for the WRC model, edge subset
* ``EF_SG``       edge flipping for the subgraph-world model, edge subset
* ``SW_ISING``    Swendsen-Wang for the Ising model, spin configuration
* ``SW_WRC``      Swendsen-Wang for the WRC model, edge subset
* ``SINGLE_BOND`` lazy single-bond update for the WRC model, edge subset

A plain step draws a lazy coin first and nothing else on lazy steps; the
fixed-shape randomness records live in :mod:`wrcsampler.cftp`.  All runs are
deterministic in (seed, counter) and identical across kernel backends;
running a chain in chunks equals one long run because the counter carries
over.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .backend import impl
from .model import (EdgeSubset, SgParams, SpinConfig, WeightedGraph,
                    WrcParams, odd_vertices)
from .rng import RngStream


class ChainKind(enum.Enum):
    EF_WRC = "ef-wrc"
    EF_SG = "ef-sg"
    SW_ISING = "sw-ising"
    SW_WRC = "sw-wrc"
    SINGLE_BOND = "sb"


#: chains whose state is a spin configuration rather than an edge subset
SPIN_CHAINS = frozenset({ChainKind.SW_ISING})


def _check_state(g: WeightedGraph, kind: ChainKind, state) -> None:
    want = g.n if kind in SPIN_CHAINS else g.m
    if state.shape != (want,) or state.dtype != np.uint8:
        raise ValueError(f"{kind.value} state must be a uint8 vector of length {want}")


def _guard_sg(g: WeightedGraph, s: SgParams, state: EdgeSubset) -> None:
    # All-zero penalties freeze the chain outside the even subgraphs.
    if np.all(s.eta == 0.0) and odd_vertices(g, state):
        raise ValueError(
            "non-ergodic: every eta is 0 but the start has odd-degree vertices; "
            "use a perturbed model")


def ef_step(g: WeightedGraph, params: WrcParams | SgParams,
            state: EdgeSubset, rng: RngStream) -> EdgeSubset:
    """One edge-flipping step in place; the model is picked by parameter type."""
    return run_chain(g, params,
                     ChainKind.EF_SG if isinstance(params, SgParams) else ChainKind.EF_WRC,
                     state, 1, rng)[0]


def sb_step(g: WeightedGraph, w: WrcParams, state: EdgeSubset,
            rng: RngStream) -> EdgeSubset:
    """One single-bond step in place."""
    return run_chain(g, w, ChainKind.SINGLE_BOND, state, 1, rng)[0]


def sw_step(g: WeightedGraph, w: WrcParams, state, kind: ChainKind,
            rng: RngStream):
    """One Swendsen-Wang step (composition order fixed by the kind)."""
    if kind not in (ChainKind.SW_ISING, ChainKind.SW_WRC):
        raise ValueError("sw_step takes SW_ISING or SW_WRC")
    return run_chain(g, w, kind, state, 1, rng)[0]


def p_i_to_r(g: WeightedGraph, w: WrcParams, spins: SpinConfig,
             rng: RngStream) -> EdgeSubset:
    """Spins to edges: each monochromatic edge joins independently with
    probability p_e (edge index order)."""
    _check_state(g, ChainKind.SW_ISING, spins)
    subset = np.zeros(g.m, dtype=np.uint8)
    for e in range(g.m):
        if spins[g.eu[e]] == spins[g.ev[e]]:
            subset[e] = 1 if rng.uniform() < w.p[e] else 0
    return subset


def p_r_to_i(g: WeightedGraph, w: WrcParams, subset: EdgeSubset,
             rng: RngStream) -> SpinConfig:
    """Edges to spins: per component (minimum-vertex order) one biased coin
    with success probability prod(lambda) / (1 + prod(lambda))."""
    _check_state(g, ChainKind.SW_WRC, subset)
    log_lam = np.log(w.lam)
    spins = np.zeros(g.n, dtype=np.uint8)
    seen = np.zeros(g.n, dtype=bool)
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        head = 0
        total = float(log_lam[start])
        while head < len(comp):
            x = comp[head]
            head += 1
            for i in range(g.adj_off[x], g.adj_off[x + 1]):
                y = int(g.adj_v[i])
                if subset[g.adj_e[i]] and not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    total += float(log_lam[y])
        pl = math.exp(total)
        val = 1 if rng.uniform() < pl / (1.0 + pl) else 0
        for v in comp:
            spins[v] = val
    return spins


def run_chain(g: WeightedGraph, params, kind: ChainKind, start,
              steps: int, rng: RngStream, trace_stride: int = 0):
    """Run ``steps`` transitions from ``start`` (mutated in place).

    Returns (state, trace): trace is None unless ``trace_stride`` >= 1, in
    which case it holds the state after every ``trace_stride`` steps as rows
    of a uint8 array (steps // trace_stride of them).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    _check_state(g, kind, start)
    trace = None
    if trace_stride:
        width = g.n if kind in SPIN_CHAINS else g.m
        trace = np.zeros((steps // trace_stride, width), dtype=np.uint8)
    if steps == 0:
        return start, trace
    if g.m == 0 and kind not in (ChainKind.SW_ISING, ChainKind.SW_WRC):
        # Edge-proposal chains are vacuous without edges; no draws consumed.
        if trace is not None:
            trace[:] = start
        return start, trace

    if kind == ChainKind.EF_SG:
        if not isinstance(params, SgParams):
            raise TypeError("EF_SG takes SgParams")
        _guard_sg(g, params, start)
        rng.counter = impl.ef_sg_run(
            g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, params.p, params.eta,
            start, steps, rng.seed, rng.counter, trace, trace_stride)
        return start, trace

    if not isinstance(params, WrcParams):
        raise TypeError(f"{kind.value} takes WrcParams")
    log_lam = np.log(params.lam)
    args = (g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, params.p, log_lam,
            start, steps, rng.seed, rng.counter, trace, trace_stride)
    if kind == ChainKind.EF_WRC:
        rng.counter = impl.ef_wrc_run(*args)
    elif kind == ChainKind.SINGLE_BOND:
        rng.counter = impl.sb_run(*args)
    elif kind == ChainKind.SW_ISING:
        rng.counter = impl.sw_ising_run(*args)
    elif kind == ChainKind.SW_WRC:
        rng.counter = impl.sw_wrc_run(*args)
    else:  # pragma: no cover
        raise ValueError(f"unknown chain kind {kind}")
    return start, trace
