"""Model parameters, representation transforms and weight functions.

Three equivalent descriptions of the same ferromagnetic system live here:

* the Ising model on a graph with per-edge interaction ``beta_e > 1`` and a
  consistent per-vertex field ``lambda_v in (0, 1]``;
* the weighted random cluster (WRC) model over edge subsets, with a
  ``1 + prod(lambda)`` factor per connected component;
* the subgraph-world model over edge subsets, penalizing each odd-degree
  vertex by ``eta_v in [0, 1)``.

Parameter conventions (the factor-of-two trap): ``WrcParams.p`` stores
``p_e = 1 - 1/beta_e``.  This is the value the Swendsen-Wang and single-bond
dynamics call ``p_e``, and the value the partition-function identity calls
``2 p_e``.  ``SgParams.p`` stores the halved value ``(1 - 1/beta_e) / 2``.
``params_from_ising`` produces both at once; chains built from the same graph
therefore share one stationary WRC distribution with no rescaling anywhere.

All weights are returned in log domain as plain floats; ``-inf`` is the zero
weight sentinel (only subgraph-world weights can vanish, when an odd vertex
carries ``eta_v = 0``).  Products of per-vertex fields over large components
underflow in linear domain, hence the convention.

States are dense 0/1 vectors: an edge subset is a ``uint8`` array of length
``m``, a spin configuration a ``uint8`` array of length ``n``.  Graphs and
parameter sets are immutable after construction; state vectors are
single-owner mutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

# State vectors; kept as aliases so signatures document intent.
EdgeSubset = np.ndarray
SpinConfig = np.ndarray

LOG_ZERO = float("-inf")


class CapExceeded(RuntimeError):
    """An enumeration or state-space cap was exceeded."""


class GraphFormatError(ValueError):
    """Malformed graph file."""


class WeightedGraph:
    """Simple undirected graph with per-vertex fields and per-edge interactions.

    Invariants enforced at construction: no self loops, no parallel edges,
    every ``lambda_v`` in (0, 1], every ``beta_e`` > 1, vertices 0..n-1.
    """

    __slots__ = ("n", "m", "edges", "lam", "beta", "log_lam",
                 "eu", "ev", "adj_off", "adj_v", "adj_e")

    def __init__(self, n: int, edges: Sequence[tuple[int, int]],
                 lam: Iterable[float], beta: Iterable[float]):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = int(n)
        self.edges = [(int(u), int(v)) for u, v in edges]
        self.m = len(self.edges)
        self.lam = np.array(list(lam), dtype=np.float64)
        self.beta = np.array(list(beta), dtype=np.float64)
        if self.lam.shape != (self.n,):
            raise ValueError(f"expected {self.n} vertex fields, got {self.lam.shape}")
        if self.beta.shape != (self.m,):
            raise ValueError(f"expected {self.m} edge interactions, got {self.beta.shape}")
        if np.any(self.lam <= 0.0) or np.any(self.lam > 1.0):
            raise ValueError("vertex fields must lie in (0, 1]")
        if np.any(self.beta <= 1.0):
            raise ValueError("edge interactions must be > 1 (ferromagnetic)")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"parallel edge ({u},{v})")
            seen.add(key)

        self.log_lam = np.log(self.lam)
        self.eu = np.array([u for u, _ in self.edges], dtype=np.int32)
        self.ev = np.array([v for _, v in self.edges], dtype=np.int32)

        # CSR adjacency; per vertex, incident edges in insertion order.
        counts = np.zeros(self.n + 1, dtype=np.int32)
        for u, v in self.edges:
            counts[u + 1] += 1
            counts[v + 1] += 1
        self.adj_off = np.cumsum(counts, dtype=np.int32)
        self.adj_v = np.zeros(2 * self.m, dtype=np.int32)
        self.adj_e = np.zeros(2 * self.m, dtype=np.int32)
        cursor = self.adj_off[:-1].copy()
        for e, (u, v) in enumerate(self.edges):
            self.adj_v[cursor[u]], self.adj_e[cursor[u]] = v, e
            cursor[u] += 1
            self.adj_v[cursor[v]], self.adj_e[cursor[v]] = u, e
            cursor[v] += 1

    @property
    def beta_max(self) -> float:
        return float(self.beta.max())

    @property
    def beta_min(self) -> float:
        return float(self.beta.min())

    @property
    def lam_max(self) -> float:
        return float(self.lam.max())

    @property
    def lam_min(self) -> float:
        return float(self.lam.min())

    def degree(self, v: int) -> int:
        return int(self.adj_off[v + 1] - self.adj_off[v])

    def __repr__(self) -> str:  # pragma: no cover
        return f"WeightedGraph(n={self.n}, m={self.m})"


@dataclass
class WrcParams:
    """Weighted random cluster parameters.

    ``p`` follows the ``p_e = 1 - 1/beta_e`` convention (see module
    docstring); the partition-function identity reads these same numbers as
    ``2 p_e``.
    """

    p: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=np.float64)
        self.lam = np.asarray(self.lam, dtype=np.float64)
        if np.any(self.p <= 0.0) or np.any(self.p >= 1.0):
            raise ValueError("WRC edge probabilities must lie in (0, 1)")
        if np.any(self.lam <= 0.0) or np.any(self.lam > 1.0):
            raise ValueError("vertex weights must lie in (0, 1]")

    @property
    def log_lam(self) -> np.ndarray:
        return np.log(self.lam)


@dataclass
class SgParams:
    """Subgraph-world parameters: ``p_e = (1 - 1/beta_e)/2``, odd-degree
    penalty ``eta_v = (1 - lambda_v)/(1 + lambda_v)``."""

    p: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=np.float64)
        self.eta = np.asarray(self.eta, dtype=np.float64)
        if np.any(self.p <= 0.0) or np.any(self.p >= 0.5):
            raise ValueError("subgraph-world edge probabilities must lie in (0, 1/2)")
        if np.any(self.eta < 0.0) or np.any(self.eta >= 1.0):
            raise ValueError("odd-degree penalties must lie in [0, 1)")

    @property
    def lam(self) -> np.ndarray:
        """Vertex weights of the matching WRC/Ising models, (1-eta)/(1+eta)."""
        return (1.0 - self.eta) / (1.0 + self.eta)

    @property
    def eta_min(self) -> float:
        return float(self.eta.min())


def params_from_ising(g: WeightedGraph) -> tuple[WrcParams, SgParams]:
    """Derive WRC and subgraph-world parameters from the Ising model on ``g``.

    WRC gets ``p_e = 1 - 1/beta_e`` and the fields unchanged; subgraph-world
    gets the halved probability and ``eta_v = (1-lambda_v)/(1+lambda_v)``.
    """
    q = 1.0 - 1.0 / g.beta
    eta = (1.0 - g.lam) / (1.0 + g.lam)
    return WrcParams(p=q, lam=g.lam.copy()), SgParams(p=q / 2.0, eta=eta)


def perturb_sg(s: SgParams, n: int) -> SgParams:
    """Raise every odd-degree penalty to at least 1/n (n = vertex count).

    Idempotent and pointwise >= the input; edge probabilities unchanged.  The
    matching vertex weights are available as ``.lam`` on the result.  A
    single-vertex model is returned unchanged: the cap 1/n = 1 would leave
    the parameter domain, and with no edges there is nothing to perturb.
    """
    if n < 1:
        raise ValueError("vertex count must be >= 1")
    if n == 1:
        return SgParams(p=s.p.copy(), eta=s.eta.copy())
    return SgParams(p=s.p.copy(), eta=np.maximum(s.eta, 1.0 / n))


# ---------------------------------------------------------------------------
# connectivity
# ---------------------------------------------------------------------------

def components(g: WeightedGraph, subset: EdgeSubset) -> list[list[int]]:
    """Connected components of (V, S), each sorted, ordered by minimum vertex."""
    _check_subset(g, subset)
    seen = np.zeros(g.n, dtype=bool)
    out: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = _bfs_collect(g, subset, start, seen)
        out.append(sorted(comp))
    return out


class Connectivity(NamedTuple):
    connected: bool
    log_prod_u: float | None  # sum of log(lambda) over u's component
    log_prod_v: float | None  # ... over v's component; None when connected


def connected(g: WeightedGraph, subset: EdgeSubset, u: int, v: int) -> Connectivity:
    """BFS connectivity of u and v in (V, S), with the two components'
    log field-products when they are disconnected."""
    if u == v:
        raise ValueError("query needs two distinct vertices")
    _check_subset(g, subset)
    seen = np.zeros(g.n, dtype=bool)
    comp_u = _bfs_collect(g, subset, u, seen)
    if v in comp_u:
        return Connectivity(True, None, None)
    comp_v = _bfs_collect(g, subset, v, seen)
    log_u = float(g.log_lam[sorted(comp_u)].sum())
    log_v = float(g.log_lam[sorted(comp_v)].sum())
    return Connectivity(False, log_u, log_v)


def _bfs_collect(g: WeightedGraph, subset: EdgeSubset, start: int,
                 seen: np.ndarray) -> set[int]:
    seen[start] = True
    comp = {start}
    queue = [start]
    while queue:
        x = queue.pop()
        for i in range(g.adj_off[x], g.adj_off[x + 1]):
            if subset[g.adj_e[i]] and not seen[g.adj_v[i]]:
                y = int(g.adj_v[i])
                seen[y] = True
                comp.add(y)
                queue.append(y)
    return comp


# ---------------------------------------------------------------------------
# weights (log domain)
# ---------------------------------------------------------------------------

def log_ising_weight(g: WeightedGraph, spins: SpinConfig) -> float:
    """log of prod_e beta_e^[monochromatic] * prod_v lambda_v^sigma(v)."""
    if spins.shape != (g.n,):
        raise ValueError("spin vector has wrong length")
    total = 0.0
    for e in range(g.m):
        if spins[g.eu[e]] == spins[g.ev[e]]:
            total += math.log(g.beta[e])
    for v in range(g.n):
        if spins[v]:
            total += g.log_lam[v]
    return total


def log_wrc_weight(g: WeightedGraph, w: WrcParams, subset: EdgeSubset) -> float:
    """log of prod_{e in S} p_e * prod_{f notin S} (1-p_f)
    * prod_components (1 + prod lambda)."""
    _check_subset(g, subset)
    if w.p.shape != (g.m,):
        raise ValueError("parameter vector has wrong length")
    total = 0.0
    for e in range(g.m):
        total += math.log(w.p[e]) if subset[e] else math.log(1.0 - w.p[e])
    log_lam = np.log(w.lam)
    for comp in components(g, subset):
        total += math.log1p(math.exp(float(log_lam[comp].sum())))
    return total


def log_sg_weight(g: WeightedGraph, s: SgParams, subset: EdgeSubset) -> float:
    """log of prod_{e in S} p_e * prod_{f notin S} (1-p_f)
    * prod_{v odd in S} eta_v; -inf when an odd vertex has eta_v = 0."""
    _check_subset(g, subset)
    if s.p.shape != (g.m,):
        raise ValueError("parameter vector has wrong length")
    total = 0.0
    for e in range(g.m):
        total += math.log(s.p[e]) if subset[e] else math.log(1.0 - s.p[e])
    for v in odd_vertices(g, subset):
        if s.eta[v] == 0.0:
            return LOG_ZERO
        total += math.log(s.eta[v])
    return total


def odd_vertices(g: WeightedGraph, subset: EdgeSubset) -> list[int]:
    """Vertices of odd degree in (V, S), ascending."""
    deg = np.zeros(g.n, dtype=np.int64)
    for e in range(g.m):
        if subset[e]:
            deg[g.eu[e]] += 1
            deg[g.ev[e]] += 1
    return [v for v in range(g.n) if deg[v] % 2 == 1]


def _check_subset(g: WeightedGraph, subset: EdgeSubset) -> None:
    if subset.shape != (g.m,):
        raise ValueError("edge subset has wrong length")


# ---------------------------------------------------------------------------
# state helpers
# ---------------------------------------------------------------------------

def empty_subset(g: WeightedGraph) -> EdgeSubset:
    return np.zeros(g.m, dtype=np.uint8)

def full_subset(g: WeightedGraph) -> EdgeSubset:
    return np.ones(g.m, dtype=np.uint8)

def bits_from_int(x: int, width: int) -> np.ndarray:
    """Dense 0/1 vector with bit i of x at position i."""
    return np.array([(x >> i) & 1 for i in range(width)], dtype=np.uint8)

def int_from_bits(bits: np.ndarray) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out

def bits_to_hex(bits: np.ndarray) -> str:
    """Hex encoding of a state, low-index entry first (bitorder='little')."""
    return bytes(np.packbits(bits, bitorder="little")).hex()

def bits_from_hex(text: str, width: int) -> np.ndarray:
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    if bits[width:].any():
        raise ValueError("stray bits beyond declared width")
    return bits[:width].astype(np.uint8)


# ---------------------------------------------------------------------------
# graph file format
# ---------------------------------------------------------------------------
# UTF-8 text.  Blank lines and lines starting with '#' are ignored.  The
# first payload line is "n m".  Then n lines "v <index> <lambda>" followed by
# m lines "e <u> <v> <beta>"; floats in decimal notation.  Duplicate vertex
# indices or edge pairs (in either orientation) are rejected.

def parse_graph(text: str) -> WeightedGraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError("header must be two integers") from exc
    if len(lines) != 1 + n + m:
        raise GraphFormatError(f"expected {n} vertex and {m} edge lines, got {len(lines) - 1}")

    lam = [None] * n
    for ln in lines[1:1 + n]:
        parts = ln.split()
        if len(parts) != 3 or parts[0] != "v":
            raise GraphFormatError(f"bad vertex line: {ln!r}")
        idx = int(parts[1])
        if not 0 <= idx < n:
            raise GraphFormatError(f"vertex index {idx} out of range")
        if lam[idx] is not None:
            raise GraphFormatError(f"duplicate vertex {idx}")
        lam[idx] = float(parts[2])
    edges, beta = [], []
    for ln in lines[1 + n:]:
        parts = ln.split()
        if len(parts) != 4 or parts[0] != "e":
            raise GraphFormatError(f"bad edge line: {ln!r}")
        edges.append((int(parts[1]), int(parts[2])))
        beta.append(float(parts[3]))
    try:
        return WeightedGraph(n, edges, lam, beta)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_graph(g: WeightedGraph) -> str:
    out = [f"{g.n} {g.m}"]
    out += [f"v {v} {float(g.lam[v])!r}" for v in range(g.n)]
    out += [f"e {u} {v} {float(g.beta[e])!r}" for e, (u, v) in enumerate(g.edges)]
    return "\n".join(out) + "\n"


def read_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
