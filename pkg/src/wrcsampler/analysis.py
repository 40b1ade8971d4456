"""Explicit transition matrices, spectral gaps and comparison inequalities.

Matrices are built from globally enumerated weights (the exact-oracle layer),
deliberately not from the samplers' local-ratio code, so detailed balance and
stationarity checks cross two independent routes.  Dense only; the default
state cap is 4096 (override per call or with WRCSAMPLER_STATE_CAP).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .dynamics import ChainKind
from .exact import (ExactDistribution, enumerate_ising, enumerate_sg,
                    enumerate_wrc)
from .model import (CapExceeded, SgParams, WeightedGraph, WrcParams,
                    bits_from_int, components, connected, params_from_ising,
                    perturb_sg)

DEFAULT_STATE_CAP = int(os.environ.get("WRCSAMPLER_STATE_CAP", 4096))


@dataclass
class ChainMatrix:
    kind: ChainKind
    width: int
    P: np.ndarray
    pi: np.ndarray

    @property
    def size(self) -> int:
        return len(self.pi)


@dataclass
class SpectralReport:
    gap: float
    eigenvalue_min: float
    reversible: bool
    psd: bool
    reversibility_residual: float


def _acceptance(lw_from: float, lw_to: float) -> float:
    """Metropolis acceptance from log weights; zero-weight targets are never
    entered, zero-weight sources escape to the support outright."""
    if lw_to == -math.inf:
        return 0.0
    if lw_from == -math.inf:
        return 1.0
    return min(1.0, math.exp(lw_to - lw_from))


def _ef_matrix(dist: ExactDistribution, m: int) -> np.ndarray:
    if m == 0:
        return np.ones((1, 1))
    size = 1 << m
    P = np.zeros((size, size))
    for x in range(size):
        stay = 1.0
        for e in range(m):
            y = x ^ (1 << e)
            a = _acceptance(dist.log_weights[x], dist.log_weights[y])
            P[x, y] = a / (2 * m)
            stay -= a / (2 * m)
        P[x, x] = stay
    return P


def _sb_matrix(g: WeightedGraph, w: WrcParams) -> np.ndarray:
    if g.m == 0:
        return np.ones((1, 1))
    size = 1 << g.m
    P = np.zeros((size, size))
    for x in range(size):
        bits = bits_from_int(x, g.m)
        P[x, x] = 0.5
        for e in range(g.m):
            u, v = int(g.eu[e]), int(g.ev[e])
            res = connected(g, bits, u, v)
            if res.connected:
                pr = float(w.p[e])
            else:
                pa = math.exp(res.log_prod_u)
                pb = math.exp(res.log_prod_v)
                pr = float(w.p[e]) * (1.0 + pa * pb) / ((1.0 + pa) * (1.0 + pb))
            with_e = x | (1 << e)
            without_e = x & ~(1 << e)
            P[x, with_e] += pr / (2 * g.m)
            P[x, without_e] += (1.0 - pr) / (2 * g.m)
    return P


def half_step_matrices(g: WeightedGraph, w: WrcParams,
                       cap: int = DEFAULT_STATE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Exact spins-to-edges (2^n x 2^m) and edges-to-spins (2^m x 2^n)
    transition matrices of the two Swendsen-Wang half steps."""
    if (1 << g.n) > cap or (1 << g.m) > cap:
        raise CapExceeded("state space exceeds the matrix cap")
    n, m = g.n, g.m
    log_p = np.log(w.p)
    log_1p = np.log(1.0 - w.p)
    p_ir = np.zeros((1 << n, 1 << m))
    for sigma in range(1 << n):
        mono = 0
        for e in range(m):
            if ((sigma >> int(g.eu[e])) & 1) == ((sigma >> int(g.ev[e])) & 1):
                mono |= 1 << e
        sub = mono
        while True:
            lw = 0.0
            for e in range(m):
                bit = 1 << e
                if mono & bit:
                    lw += log_p[e] if sub & bit else log_1p[e]
            p_ir[sigma, sub] = math.exp(lw)
            if sub == 0:
                break
            sub = (sub - 1) & mono

    log_lam = np.log(w.lam)
    p_ri = np.zeros((1 << m, 1 << n))
    for s in range(1 << m):
        comps = components(g, bits_from_int(s, m))
        probs1 = []
        masks = []
        for comp in comps:
            pl = math.exp(float(log_lam[comp].sum()))
            probs1.append(pl / (1.0 + pl))
            mask = 0
            for v in comp:
                mask |= 1 << v
            masks.append(mask)
        for choice in range(1 << len(comps)):
            sigma = 0
            weight = 1.0
            for c in range(len(comps)):
                if (choice >> c) & 1:
                    sigma |= masks[c]
                    weight *= probs1[c]
                else:
                    weight *= 1.0 - probs1[c]
            p_ri[s, sigma] = weight
    return p_ir, p_ri


def build_matrix(kind: ChainKind, g: WeightedGraph, params,
                 cap: int = DEFAULT_STATE_CAP) -> ChainMatrix:
    """Exact transition matrix with its stationary vector."""
    if kind == ChainKind.EF_SG:
        if not isinstance(params, SgParams):
            raise TypeError("EF_SG takes SgParams")
        if (1 << g.m) > cap:
            raise CapExceeded("state space exceeds the matrix cap")
        dist = enumerate_sg(g, params)
        return ChainMatrix(kind, g.m, _ef_matrix(dist, g.m), dist.probs)

    if not isinstance(params, WrcParams):
        raise TypeError(f"{kind.value} takes WrcParams")
    if kind == ChainKind.EF_WRC:
        if (1 << g.m) > cap:
            raise CapExceeded("state space exceeds the matrix cap")
        dist = enumerate_wrc(g, params)
        return ChainMatrix(kind, g.m, _ef_matrix(dist, g.m), dist.probs)
    if kind == ChainKind.SINGLE_BOND:
        if (1 << g.m) > cap:
            raise CapExceeded("state space exceeds the matrix cap")
        dist = enumerate_wrc(g, params)
        return ChainMatrix(kind, g.m, _sb_matrix(g, params), dist.probs)
    if kind in (ChainKind.SW_ISING, ChainKind.SW_WRC):
        p_ir, p_ri = half_step_matrices(g, params, cap)
        if kind == ChainKind.SW_ISING:
            dist = enumerate_ising(g)
            return ChainMatrix(kind, g.n, p_ir @ p_ri, dist.probs)
        dist = enumerate_wrc(g, params)
        return ChainMatrix(kind, g.m, p_ri @ p_ir, dist.probs)
    raise ValueError(f"unknown chain kind {kind}")  # pragma: no cover


def reversibility_residual(cm: ChainMatrix) -> float:
    flow = cm.pi[:, None] * cm.P
    return float(np.abs(flow - flow.T).max())


def stationarity_residual(cm: ChainMatrix) -> float:
    return float(np.abs(cm.pi @ cm.P - cm.pi).max())


def spectral(cm: ChainMatrix, reversibility_tol: float = 1e-10) -> SpectralReport:
    """Full spectrum via similarity with diag(sqrt(pi)).

    Zero-probability states (possible for the subgraph-world chain) are cut
    out first; the chain never leaves the support, so the restriction is
    stochastic.  Raises on non-reversible input.
    """
    resid = reversibility_residual(cm)
    if resid > reversibility_tol:
        raise ValueError(f"chain is not reversible (residual {resid:.3e})")
    support = cm.pi > 0.0
    P = cm.P[np.ix_(support, support)]
    pi = cm.pi[support]
    sqrt_pi = np.sqrt(pi)
    sym = sqrt_pi[:, None] * P / sqrt_pi[None, :]
    sym = 0.5 * (sym + sym.T)
    evals = np.linalg.eigvalsh(sym)
    gap = 1.0 - float(evals[-2]) if len(evals) > 1 else 1.0
    emin = float(evals[0])
    return SpectralReport(gap=gap, eigenvalue_min=emin, reversible=True,
                          psd=emin >= -1e-9, reversibility_residual=resid)


def verify_adjointness(g: WeightedGraph, cap: int = DEFAULT_STATE_CAP) -> dict:
    """diag(pi_ising) P_IR = P_RI^T diag(pi_wrc), plus the two stationarity
    transport identities, all entrywise."""
    w, _ = params_from_ising(g)
    p_ir, p_ri = half_step_matrices(g, w, cap)
    pi_i = enumerate_ising(g).probs
    pi_r = enumerate_wrc(g, w).probs
    lhs = pi_i[:, None] * p_ir
    rhs = p_ri.T * pi_r[None, :]
    residual = float(np.abs(lhs - rhs).max())
    res_to_r = float(np.abs(pi_i @ p_ir - pi_r).max())
    res_to_i = float(np.abs(pi_r @ p_ri - pi_i).max())
    worst = max(residual, res_to_r, res_to_i)
    return {"check": "half-step-adjointness", "lhs": float(lhs.max()),
            "rhs": float(rhs.max()), "residual": worst,
            "matrix_residual": residual, "transport_residuals": [res_to_r, res_to_i],
            "pass": bool(worst <= 1e-10)}


def verify_gap_inequalities(g: WeightedGraph, cap: int = DEFAULT_STATE_CAP) -> dict:
    """The Swendsen-Wang / edge-flipping / single-bond comparison suite:

    * Gap(SW over spins) = Gap(SW over edges)    (within 1e-9)
    * Gap(SW over edges) >= Gap(EF) / 3
    * Gap(SB) <= Gap(SW over edges)
    * entrywise P_SB >= P_EF / 3 off the diagonal
    * both SW matrices positive semidefinite
    """
    w, _ = params_from_ising(g)
    ef = build_matrix(ChainKind.EF_WRC, g, w, cap)
    sb = build_matrix(ChainKind.SINGLE_BOND, g, w, cap)
    sw_i = build_matrix(ChainKind.SW_ISING, g, w, cap)
    sw_r = build_matrix(ChainKind.SW_WRC, g, w, cap)
    sp_ef = spectral(ef)
    sp_sb = spectral(sb)
    sp_swi = spectral(sw_i)
    sp_swr = spectral(sw_r)
    off = ~np.eye(sb.size, dtype=bool)
    entrywise_margin = float((sb.P - ef.P / 3.0)[off].min())
    checks = [
        {"check": "gap-sw-spin-vs-edge", "lhs": sp_swi.gap, "rhs": sp_swr.gap,
         "residual": abs(sp_swi.gap - sp_swr.gap),
         "pass": bool(abs(sp_swi.gap - sp_swr.gap) <= 1e-9)},
        {"check": "gap-sw-vs-ef-third", "lhs": sp_swr.gap, "rhs": sp_ef.gap / 3.0,
         "residual": max(0.0, sp_ef.gap / 3.0 - sp_swr.gap),
         "pass": bool(sp_swr.gap >= sp_ef.gap / 3.0 - 1e-12)},
        {"check": "gap-sb-below-sw", "lhs": sp_sb.gap, "rhs": sp_swr.gap,
         "residual": max(0.0, sp_sb.gap - sp_swr.gap),
         "pass": bool(sp_sb.gap <= sp_swr.gap + 1e-12)},
        {"check": "entrywise-sb-vs-ef-third", "lhs": entrywise_margin, "rhs": 0.0,
         "residual": max(0.0, -entrywise_margin),
         "pass": bool(entrywise_margin >= -1e-12)},
        {"check": "sw-psd", "lhs": min(sp_swi.eigenvalue_min, sp_swr.eigenvalue_min),
         "rhs": 0.0,
         "residual": max(0.0, -min(sp_swi.eigenvalue_min, sp_swr.eigenvalue_min)),
         "pass": bool(sp_swi.eigenvalue_min >= -1e-9 and sp_swr.eigenvalue_min >= -1e-9)},
    ]
    return {"check": "gap-inequalities", "checks": checks,
            "gaps": {"ef": sp_ef.gap, "sb": sp_sb.gap, "sw_spin": sp_swi.gap,
                     "sw_edge": sp_swr.gap},
            "pass": all(c["pass"] for c in checks)}


def verify_perturbation_bounds(g: WeightedGraph, s: SgParams | None = None,
                               cap: int = DEFAULT_STATE_CAP) -> dict:
    """Compare the WRC model against its penalty-capped perturbation:

    * stationary ratios within [1/9, e)
    * one-flip (and holding) transition ratios within [1/2, 2]
    * Gap(original) >= Gap(perturbed) / 441
    """
    if s is None:
        _, s = params_from_ising(g)
    s_hat = perturb_sg(s, g.n)
    w = WrcParams(p=2.0 * s.p, lam=s.lam)
    w_hat = WrcParams(p=2.0 * s_hat.p, lam=s_hat.lam)
    ef = build_matrix(ChainKind.EF_WRC, g, w, cap)
    ef_hat = build_matrix(ChainKind.EF_WRC, g, w_hat, cap)

    ratios = ef_hat.pi / ef.pi
    lo, hi = float(ratios.min()), float(ratios.max())
    dist_ok = lo >= 1.0 / 9.0 - 1e-12 and hi < math.e

    tr_lo, tr_hi = math.inf, -math.inf
    for x in range(ef.size):
        for e in range(g.m + 1):
            y = x if e == g.m else x ^ (1 << e)  # holding move included
            ratio = ef_hat.P[x, y] / ef.P[x, y]
            tr_lo = min(tr_lo, ratio)
            tr_hi = max(tr_hi, ratio)
    tran_ok = tr_lo >= 0.5 - 1e-12 and tr_hi <= 2.0 + 1e-12

    gap = spectral(ef).gap
    gap_hat = spectral(ef_hat).gap
    gap_ok = gap >= gap_hat / 441.0 - 1e-12

    checks = [
        {"check": "perturbed-stationary-ratio", "lhs": lo, "rhs": hi,
         "residual": max(0.0, 1.0 / 9.0 - lo, hi - math.e), "pass": bool(dist_ok)},
        {"check": "perturbed-transition-ratio", "lhs": tr_lo, "rhs": tr_hi,
         "residual": max(0.0, 0.5 - tr_lo, tr_hi - 2.0), "pass": bool(tran_ok)},
        {"check": "perturbed-gap-441", "lhs": gap, "rhs": gap_hat / 441.0,
         "residual": max(0.0, gap_hat / 441.0 - gap), "pass": bool(gap_ok)},
    ]
    return {"check": "perturbation-bounds", "checks": checks,
            "gap": gap, "gap_perturbed": gap_hat,
            "pass": all(c["pass"] for c in checks)}


def tv_distance(p, q) -> float:
    """Half the L1 distance between two distributions on the same states."""
    pv = p.probs if isinstance(p, ExactDistribution) else np.asarray(p, dtype=np.float64)
    qv = q.probs if isinstance(q, ExactDistribution) else np.asarray(q, dtype=np.float64)
    if pv.shape != qv.shape:
        raise ValueError("distributions live on different state spaces")
    return 0.5 * float(np.abs(pv - qv).sum())


def empirical_mixing_time(kind: ChainKind, g: WeightedGraph, params,
                          eps: float, cap: int = DEFAULT_STATE_CAP) -> dict:
    """Exact worst-start mixing time by repeated matrix-vector products,
    reported next to the spectral upper bound
    (1/Gap) (log 1/pi_min + log 1/eps)."""
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    cm = build_matrix(kind, g, params, cap)
    sp = spectral(cm)
    pos = cm.pi[cm.pi > 0.0]
    pi_min = float(pos.min())
    bound = (math.log(1.0 / pi_min) + math.log(1.0 / eps)) / sp.gap if sp.gap > 0 else math.inf
    limit = int(bound) + 100
    worst = 0
    for x0 in range(cm.size):
        if cm.pi[x0] == 0.0:
            continue
        dist = np.zeros(cm.size)
        dist[x0] = 1.0
        t = 0
        while 0.5 * float(np.abs(dist - cm.pi).sum()) > eps:
            dist = dist @ cm.P
            t += 1
            if t > limit:
                raise RuntimeError("mixing-time iteration exceeded the spectral bound")
        worst = max(worst, t)
    return {"check": "empirical-mixing-time", "kind": kind.value, "eps": eps,
            "t_mix": worst, "spectral_bound": bound, "gap": sp.gap,
            "pi_min": pi_min, "pass": bool(worst <= bound)}
