"""Brute-force oracles: full enumerations, Holant sums and identity checks.

Everything here favors transparency over speed; it is the reference layer
the samplers and matrices are validated against.  State spaces are indexed
by integers 0 .. 2^w - 1, bit i of the integer being entry i of the dense
state vector (see :func:`wrcsampler.model.bits_from_int`).

Checks return plain dict records ``{check, lhs, rhs, residual, pass, ...}``
so the CLI can emit them as JSON lines unchanged.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .model import (CapExceeded, SgParams, WeightedGraph, WrcParams,
                    bits_from_int, components, params_from_ising)

DEFAULT_CAP = int(os.environ.get("WRCSAMPLER_ENUM_CAP", 1 << 22))


@dataclass
class ExactDistribution:
    """A fully enumerated distribution over 2^width states."""

    kind: str               # "ising" | "wrc" | "sg"
    width: int              # state vector length (n or m)
    log_weights: np.ndarray  # per state, -inf for zero weight
    logz: float
    probs: np.ndarray

    @property
    def states(self) -> np.ndarray:
        return np.arange(1 << self.width, dtype=np.int64)

    @property
    def pi_min(self) -> float:
        pos = self.probs[self.probs > 0.0]
        return float(pos.min())

    def state_bits(self, idx: int) -> np.ndarray:
        return bits_from_int(idx, self.width)


def _finish(kind: str, width: int, logw: np.ndarray) -> ExactDistribution:
    logz = float(logsumexp(logw))
    probs = np.exp(logw - logz)
    return ExactDistribution(kind, width, logw, logz, probs)


def _cap_check(width: int, cap: int) -> None:
    if (1 << width) > cap:
        raise CapExceeded(f"2^{width} states exceed the enumeration cap {cap}")


def enumerate_ising(g: WeightedGraph, cap: int = DEFAULT_CAP) -> ExactDistribution:
    """All 2^n spin configurations."""
    _cap_check(g.n, cap)
    states = np.arange(1 << g.n, dtype=np.int64)
    logw = np.zeros(len(states))
    for e in range(g.m):
        same = (((states >> int(g.eu[e])) ^ (states >> int(g.ev[e]))) & 1) == 0
        logw[same] += math.log(g.beta[e])
    for v in range(g.n):
        on = ((states >> v) & 1) == 1
        logw[on] += g.log_lam[v]
    return _finish("ising", g.n, logw)


def _edge_factor(m: int, p: np.ndarray) -> np.ndarray:
    states = np.arange(1 << m, dtype=np.int64)
    logw = np.zeros(len(states))
    for e in range(m):
        inside = ((states >> e) & 1) == 1
        logw[inside] += math.log(p[e])
        logw[~inside] += math.log(1.0 - p[e])
    return logw


def enumerate_wrc(g: WeightedGraph, w: WrcParams, cap: int = DEFAULT_CAP) -> ExactDistribution:
    """All 2^m edge subsets of the weighted random cluster model."""
    _cap_check(g.m, cap)
    logw = _edge_factor(g.m, w.p)
    log_lam = np.log(w.lam)
    for idx in range(1 << g.m):
        bits = bits_from_int(idx, g.m)
        for comp in components(g, bits):
            logw[idx] += math.log1p(math.exp(float(log_lam[comp].sum())))
    return _finish("wrc", g.m, logw)


def enumerate_sg(g: WeightedGraph, s: SgParams, cap: int = DEFAULT_CAP) -> ExactDistribution:
    """All 2^m edge subsets of the subgraph-world model."""
    _cap_check(g.m, cap)
    states = np.arange(1 << g.m, dtype=np.int64)
    logw = _edge_factor(g.m, s.p)
    inc_mask = np.zeros(g.n, dtype=np.int64)
    for e in range(g.m):
        inc_mask[g.eu[e]] |= 1 << e
        inc_mask[g.ev[e]] |= 1 << e
    for v in range(g.n):
        parity = (np.bitwise_count(states & inc_mask[v]) & 1).astype(bool)
        log_eta = math.log(s.eta[v]) if s.eta[v] > 0.0 else -math.inf
        logw[parity] += log_eta
    return _finish("sg", g.m, logw)


# ---------------------------------------------------------------------------
# three-model equivalence
# ---------------------------------------------------------------------------

def verify_equivalence(g: WeightedGraph, rel_tol: float = 1e-10,
                       cap: int = DEFAULT_CAP) -> dict:
    """Check prod(beta) * Z_wrc = Z_ising = prod(1+lambda) * prod(beta) * Z_sg
    with the parameters derived from the Ising model on ``g``.

    Comparison happens on log partition functions, so the residual is a
    relative one.
    """
    w, s = params_from_ising(g)
    log_beta = float(np.log(g.beta).sum())
    log_1pl = float(np.log1p(g.lam).sum())
    lz_ising = enumerate_ising(g, cap).logz
    lz_wrc = enumerate_wrc(g, w, cap).logz
    lz_sg = enumerate_sg(g, s, cap).logz
    lhs = log_beta + lz_wrc
    rhs = log_1pl + log_beta + lz_sg
    residual = max(abs(lhs - lz_ising), abs(rhs - lz_ising))
    return {
        "check": "three-model-equivalence",
        "lhs": lhs,
        "rhs": rhs,
        "log_z_ising": lz_ising,
        "residual": residual,
        "pass": bool(residual <= rel_tol),
    }


# ---------------------------------------------------------------------------
# Holant sums and holographic transforms
# ---------------------------------------------------------------------------

@dataclass
class SymmetricSignature:
    """Symmetric function of d binary inputs, stored by Hamming weight."""

    values: np.ndarray  # length d + 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def arity(self) -> int:
        return len(self.values) - 1

    def full_tensor(self) -> np.ndarray:
        """The 2^d tensor with entry f[popcount(x)] at index x."""
        d = self.arity
        t = np.zeros((2,) * d) if d else np.zeros(())
        for x in range(1 << d):
            idx = tuple((x >> i) & 1 for i in range(d))
            t[idx] = self.values[bin(x).count("1")]
        return t

    @classmethod
    def from_tensor(cls, t: np.ndarray, tol: float = 1e-9) -> "SymmetricSignature":
        """Re-read a symmetric tensor; rejects asymmetric input."""
        d = t.ndim
        vals = np.zeros(d + 1)
        seen = [False] * (d + 1)
        scale = max(float(np.abs(t).max()), 1.0)
        for x in range(1 << d):
            idx = tuple((x >> i) & 1 for i in range(d))
            w = bin(x).count("1")
            if not seen[w]:
                vals[w] = t[idx]
                seen[w] = True
            elif abs(t[idx] - vals[w]) > tol * scale:
                raise ValueError("transformed tensor is not symmetric")
        return cls(vals)


@dataclass
class HolTransform:
    """An invertible 2x2 basis change applied to all signatures."""

    mat: np.ndarray
    inv: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=np.float64)
        if self.mat.shape != (2, 2):
            raise ValueError("transform must be 2x2")
        det = np.linalg.det(self.mat)
        if abs(det) < 1e-12:
            raise ValueError("transform must be invertible")
        if self.inv is None:
            self.inv = np.linalg.inv(self.mat)
        else:
            self.inv = np.asarray(self.inv, dtype=np.float64)

    @classmethod
    def hadamard(cls) -> "HolTransform":
        """[[1, 1], [1, -1]]; swaps the equality and parity bases."""
        return cls(np.array([[1.0, 1.0], [1.0, -1.0]]))

    @classmethod
    def identity(cls) -> "HolTransform":
        return cls(np.eye(2))


def ising_signatures(g: WeightedGraph) -> tuple[list[SymmetricSignature], list[SymmetricSignature]]:
    """Vertex signatures [1, 0, ..., 0, lambda_v], edge signatures [beta, 1, beta]."""
    fs = []
    for v in range(g.n):
        vals = np.zeros(g.degree(v) + 1)
        vals[0] = 1.0
        vals[-1] += g.lam[v]  # += so degree-0 vertices read [1 + lambda]
        fs.append(SymmetricSignature(vals))
    gs = [SymmetricSignature(np.array([b, 1.0, b])) for b in g.beta]
    return fs, gs


def sg_signatures(g: WeightedGraph, s: SgParams) -> tuple[list[SymmetricSignature], list[SymmetricSignature]]:
    """Vertex signatures [1, eta_v, 1, eta_v, ...], edge signatures [1-p, 0, p]."""
    fs = []
    for v in range(g.n):
        d = g.degree(v)
        vals = np.array([1.0 if w % 2 == 0 else s.eta[v] for w in range(d + 1)])
        fs.append(SymmetricSignature(vals))
    gs = [SymmetricSignature(np.array([1.0 - p, 0.0, p])) for p in s.p]
    return fs, gs


def holant(g: WeightedGraph, fs: list[SymmetricSignature],
           gs: list[SymmetricSignature], cap: int = DEFAULT_CAP) -> float:
    """Brute-force Holant of the vertex-edge incidence graph of ``g``.

    Each edge e contributes two half-edges (bit 2e at eu[e], bit 2e+1 at
    ev[e]); the sum runs over all 2^(2m) half-edge assignments.
    """
    if len(fs) != g.n or len(gs) != g.m:
        raise ValueError("one signature per vertex and per edge required")
    for v in range(g.n):
        if fs[v].arity != g.degree(v):
            raise ValueError(f"vertex {v} signature arity mismatch")
    for e in range(g.m):
        if gs[e].arity != 2:
            raise ValueError("edge signatures must be binary")
    h = 2 * g.m
    if (1 << h) > cap:
        raise CapExceeded(f"2^{h} half-edge assignments exceed the cap {cap}")
    assign = np.arange(1 << h, dtype=np.int64)
    total = np.ones(len(assign))
    half_mask = np.zeros(g.n, dtype=np.int64)
    for e in range(g.m):
        half_mask[g.eu[e]] |= 1 << (2 * e)
        half_mask[g.ev[e]] |= 1 << (2 * e + 1)
    for v in range(g.n):
        w = np.bitwise_count(assign & half_mask[v]).astype(np.int64)
        total *= fs[v].values[w]
    for e in range(g.m):
        w = ((assign >> (2 * e)) & 1) + ((assign >> (2 * e + 1)) & 1)
        total *= gs[e].values[w]
    return float(total.sum())


def transform_signatures(fs, gs, t: HolTransform):
    """Row-transform the vertex side by T, column-transform the edge side by
    T^-1; Holant is invariant under this pair."""
    fs2 = []
    for f in fs:
        tensor = f.full_tensor()
        for _ in range(f.arity):
            tensor = np.tensordot(tensor, t.mat, axes=(0, 0))
        fs2.append(SymmetricSignature.from_tensor(np.asarray(tensor)))
    gs2 = []
    for s in gs:
        tensor = s.full_tensor()
        for _ in range(s.arity):
            tensor = np.tensordot(tensor, t.inv, axes=(0, 1))
        gs2.append(SymmetricSignature.from_tensor(np.asarray(tensor)))
    return fs2, gs2


def verify_hol_transform(g: WeightedGraph, fs, gs, t: HolTransform,
                         rel_tol: float = 1e-10, cap: int = DEFAULT_CAP) -> dict:
    """Holant invariance under (F T | T^-1 G)."""
    lhs = holant(g, fs, gs, cap)
    fs2, gs2 = transform_signatures(fs, gs, t)
    rhs = holant(g, fs2, gs2, cap)
    residual = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return {"check": "holant-invariance", "lhs": lhs, "rhs": rhs,
            "residual": residual, "pass": bool(residual <= rel_tol)}


def verify_counting_identity(g: WeightedGraph, lam: np.ndarray | None = None,
                             rel_tol: float = 1e-10, cap: int = DEFAULT_CAP) -> dict:
    """Component-product identity behind the dilution coupling:

    prod_components (1 + prod lambda)
      = prod_v (1 + lambda_v) * (1/2)^m * sum_{E' subset E} prod_{odd(E')} eta
    with eta_v = (1 - lambda_v)/(1 + lambda_v).
    """
    _cap_check(g.m, cap)
    if lam is None:
        lam = g.lam
    lam = np.asarray(lam, dtype=np.float64)
    eta = (1.0 - lam) / (1.0 + lam)
    lhs = 1.0
    for comp in components(g, np.ones(g.m, dtype=np.uint8)):
        lhs *= 1.0 + float(np.prod(lam[comp]))
    states = np.arange(1 << g.m, dtype=np.int64)
    prod = np.ones(len(states))
    inc_mask = np.zeros(g.n, dtype=np.int64)
    for e in range(g.m):
        inc_mask[g.eu[e]] |= 1 << e
        inc_mask[g.ev[e]] |= 1 << e
    for v in range(g.n):
        parity = (np.bitwise_count(states & inc_mask[v]) & 1).astype(bool)
        prod[parity] *= eta[v]
    rhs = float(np.prod(1.0 + lam)) * 0.5 ** g.m * float(prod.sum())
    residual = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return {"check": "subgraph-counting-identity", "lhs": lhs, "rhs": rhs,
            "residual": residual, "pass": bool(residual <= rel_tol)}


# ---------------------------------------------------------------------------
# dilution coupling
# ---------------------------------------------------------------------------

def dilute_distribution(g: WeightedGraph, s: SgParams,
                        cap: int = DEFAULT_CAP) -> np.ndarray:
    """Distribution of R = S + independent extra edges, S subgraph-world.

    Each absent edge of the sample joins with probability p_e / (1 - p_e);
    computed exactly by summing over all (S, R) pairs with S subset of R.
    """
    _cap_check(g.m, cap)
    dist = enumerate_sg(g, s, cap)
    p_add = s.p / (1.0 - s.p)
    full = (1 << g.m) - 1
    out = np.zeros(1 << g.m)
    for sub in range(1 << g.m):
        ps = float(dist.probs[sub])
        if ps == 0.0:
            continue
        rest = full ^ sub
        extra = rest
        while True:
            weight = 1.0
            for e in range(g.m):
                bit = 1 << e
                if rest & bit:
                    weight *= p_add[e] if extra & bit else 1.0 - p_add[e]
            out[sub | extra] += ps * weight
            if extra == 0:
                break
            extra = (extra - 1) & rest
    return out


def verify_coupling(g: WeightedGraph, s: SgParams, tol: float = 1e-10,
                    cap: int = DEFAULT_CAP) -> dict:
    """Total variation between the diluted subgraph-world distribution and
    the WRC distribution with parameters (2p, (1-eta)/(1+eta))."""
    diluted = dilute_distribution(g, s, cap)
    target = enumerate_wrc(g, WrcParams(p=2.0 * s.p, lam=s.lam), cap)
    tv = 0.5 * float(np.abs(diluted - target.probs).sum())
    return {"check": "dilution-coupling", "lhs": float(diluted.max()),
            "rhs": float(target.probs.max()), "residual": tv,
            "pass": bool(tv <= tol)}
