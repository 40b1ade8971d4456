"""Canonical paths for the subgraph-world flipping chain and exact congestion.

For states X, Y the symmetric difference X xor Y decomposes into edge-disjoint
simple paths and cycles, with exactly k paths when X xor Y has 2k odd-degree
vertices.  The decomposition is canonicalized by exhaustive choice: pieces are
keyed by their sorted edge-index tuples, all paths precede all cycles, and the
lexicographically smallest piece sequence wins.  Unwinding toggles each piece's
edges in traversal order (paths from their smaller endpoint; cycles from their
smallest vertex toward its smaller neighbour), giving a transition sequence of
the flipping chain from X to Y of length at most m.

The flow that routes pi(X) pi(Y) along each ordered pair's canonical path has
congestion that upper-bounds the inverse spectral gap; ``congestion`` computes
it exactly together with the per-transition load bounds.  Everything here is
exponential by design and intended for m <= 7 or so.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import build_matrix, spectral
from .dynamics import ChainKind
from .exact import enumerate_sg
from .model import (EdgeSubset, SgParams, WeightedGraph, bits_from_int,
                    int_from_bits)

PieceKey = tuple[int, ...]


@dataclass
class SymmetricDifferenceDecomposition:
    """Edge-disjoint simple paths and cycles covering X xor Y, canonical order."""

    paths: list[PieceKey]
    cycles: list[PieceKey]

    @property
    def pieces(self) -> list[PieceKey]:
        return self.paths + self.cycles


@dataclass
class CanonicalPath:
    """States (as integers) visited from X to Y, toggling one edge per step."""

    states: list[int]
    edge_order: list[int]

    @property
    def length(self) -> int:
        return len(self.edge_order)


def _classify(g: WeightedGraph, edge_mask: int) -> str | None:
    """'path' / 'cycle' when the edge set forms a simple one, else None."""
    deg: dict[int, int] = {}
    count = 0
    for e in range(g.m):
        if edge_mask >> e & 1:
            count += 1
            for v in (int(g.eu[e]), int(g.ev[e])):
                deg[v] = deg.get(v, 0) + 1
    if count == 0:
        return None
    ones = sum(1 for d in deg.values() if d == 1)
    twos = sum(1 for d in deg.values() if d == 2)
    if ones + twos != len(deg):
        return None
    if not _connected_mask(g, edge_mask):
        return None
    if ones == 2:
        return "path"
    if ones == 0:
        return "cycle"
    return None


def _connected_mask(g: WeightedGraph, edge_mask: int) -> bool:
    verts = set()
    for e in range(g.m):
        if edge_mask >> e & 1:
            verts.add(int(g.eu[e]))
            verts.add(int(g.ev[e]))
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for i in range(g.adj_off[x], g.adj_off[x + 1]):
            if edge_mask >> int(g.adj_e[i]) & 1:
                y = int(g.adj_v[i])
                if y in verts and y not in seen:
                    seen.add(y)
                    stack.append(y)
    return seen == verts


def _piece_key(edge_mask: int, m: int) -> PieceKey:
    return tuple(e for e in range(m) if edge_mask >> e & 1)


def _all_pieces(g: WeightedGraph, diff_mask: int) -> dict[int, str]:
    """All simple paths/cycles using only edges of diff_mask."""
    out: dict[int, str] = {}
    sub = diff_mask
    while True:
        if sub:
            klass = _classify(g, sub)
            if klass:
                out[sub] = klass
        if sub == 0:
            break
        sub = (sub - 1) & diff_mask
    return out


def decompose(g: WeightedGraph, x: EdgeSubset, y: EdgeSubset) -> SymmetricDifferenceDecomposition:
    """Canonical decomposition of X xor Y (see module docstring).

    Exhaustive: enumerates every exact cover of the difference by simple
    paths and cycles with exactly k = |odd| / 2 paths and keeps the
    lexicographic minimum.
    """
    diff = int_from_bits(np.bitwise_xor(x, y))
    if diff == 0:
        return SymmetricDifferenceDecomposition([], [])
    deg: dict[int, int] = {}
    for e in range(g.m):
        if diff >> e & 1:
            for v in (int(g.eu[e]), int(g.ev[e])):
                deg[v] = deg.get(v, 0) + 1
    k = sum(1 for d in deg.values() if d % 2 == 1) // 2
    pieces = _all_pieces(g, diff)

    best: tuple | None = None

    def search(remaining: int, paths: list[int], cycles: list[int]):
        nonlocal best
        if remaining == 0:
            if len(paths) != k:
                return
            key = (
                tuple(sorted(_piece_key(p, g.m) for p in paths)),
                tuple(sorted(_piece_key(c, g.m) for c in cycles)),
            )
            if best is None or key < best:
                best = key
            return
        lowest = remaining & -remaining
        for mask, klass in pieces.items():
            if mask & lowest and (mask & ~remaining) == 0:
                if klass == "path":
                    if len(paths) == k:
                        continue
                    paths.append(mask)
                    search(remaining ^ mask, paths, cycles)
                    paths.pop()
                else:
                    cycles.append(mask)
                    search(remaining ^ mask, paths, cycles)
                    cycles.pop()

    search(diff, [], [])
    if best is None:
        raise RuntimeError("no decomposition found; graph bookkeeping is broken")
    return SymmetricDifferenceDecomposition(list(best[0]), list(best[1]))


def _path_traversal(g: WeightedGraph, piece: PieceKey) -> list[int]:
    """Edges of a simple path from its smaller endpoint onward."""
    deg: dict[int, list[int]] = {}
    for e in piece:
        for v in (int(g.eu[e]), int(g.ev[e])):
            deg.setdefault(v, []).append(e)
    endpoints = sorted(v for v, es in deg.items() if len(es) == 1)
    cur = endpoints[0]
    used = set()
    order = []
    while len(order) < len(piece):
        e = next(e for e in deg[cur] if e not in used)
        used.add(e)
        order.append(e)
        cur = int(g.ev[e]) if int(g.eu[e]) == cur else int(g.eu[e])
    return order


def _cycle_traversal(g: WeightedGraph, piece: PieceKey) -> list[int]:
    """Edges of a simple cycle from its smallest vertex, toward the smaller
    of that vertex's two neighbours."""
    inc: dict[int, list[int]] = {}
    for e in piece:
        for v in (int(g.eu[e]), int(g.ev[e])):
            inc.setdefault(v, []).append(e)
    start = min(inc)
    first_candidates = []
    for e in inc[start]:
        other = int(g.ev[e]) if int(g.eu[e]) == start else int(g.eu[e])
        first_candidates.append((other, e))
    _, first = min(first_candidates)
    order = [first]
    used = {first}
    cur = min(first_candidates)[0]
    while cur != start:
        e = next(e for e in inc[cur] if e not in used)
        used.add(e)
        order.append(e)
        cur = int(g.ev[e]) if int(g.eu[e]) == cur else int(g.eu[e])
    return order


def canonical_path(g: WeightedGraph, x: EdgeSubset, y: EdgeSubset) -> CanonicalPath:
    """The canonical transition sequence from X to Y."""
    decomp = decompose(g, x, y)
    order: list[int] = []
    for piece in decomp.paths:
        order.extend(_path_traversal(g, piece))
    for piece in decomp.cycles:
        order.extend(_cycle_traversal(g, piece))
    state = int_from_bits(x)
    states = [state]
    for e in order:
        state ^= 1 << e
        states.append(state)
    assert states[-1] == int_from_bits(y)
    return CanonicalPath(states, order)


def reconstruct_endpoints(g: WeightedGraph, z: int, z_next: int, u: int,
                          ) -> tuple[int, int]:
    """Invert (Z, Z') on a canonical path plus the witness U = X^Y^Z back to
    (X, Y); distinct (X, Y) routed through (Z, Z') give distinct witnesses."""
    diff = u ^ z  # = X xor Y
    zero = bits_from_int(0, g.m)
    dbits = bits_from_int(diff, g.m)
    decomp = decompose(g, zero, dbits)
    order: list[int] = []
    for piece in decomp.paths:
        order.extend(_path_traversal(g, piece))
    for piece in decomp.cycles:
        order.extend(_cycle_traversal(g, piece))
    toggled = z ^ z_next
    e_step = toggled.bit_length() - 1
    pos = order.index(e_step)
    prefix = 0
    for e in order[:pos]:
        prefix |= 1 << e
    x = z ^ prefix
    y = x ^ diff
    return x, y


@dataclass
class CongestionReport:
    rho: float
    max_length: int
    max_load_transition: tuple[int, int]
    gap: float
    load_bound_ok: bool
    flow_residual: float

    @property
    def bound_ok(self) -> bool:
        return self.rho >= 1.0 / self.gap - 1e-9


def congestion(g: WeightedGraph, s: SgParams, max_edges: int = 7) -> CongestionReport:
    """Exact congestion of the canonical-path flow for the subgraph-world
    flipping chain, with the per-transition load bounds checked."""
    if g.m > max_edges:
        raise ValueError(f"congestion is exponential; m={g.m} exceeds {max_edges}")
    if s.eta_min == 0.0:
        raise ValueError("load bounds need every odd-degree penalty positive")
    dist = enumerate_sg(g, s)
    cm = build_matrix(ChainKind.EF_SG, g, s)
    size = 1 << g.m
    load = np.zeros((size, g.m))

    # decomposition and unwind order depend only on the difference mask
    order_by_diff: dict[int, list[int]] = {0: []}
    zero = bits_from_int(0, g.m)
    for diff in range(1, size):
        dbits = bits_from_int(diff, g.m)
        decomp = decompose(g, zero, dbits)
        order: list[int] = []
        for piece in decomp.paths:
            order.extend(_path_traversal(g, piece))
        for piece in decomp.cycles:
            order.extend(_cycle_traversal(g, piece))
        order_by_diff[diff] = order

    max_len = 0
    flow_residual = 0.0
    for x in range(size):
        for y in range(size):
            order = order_by_diff[x ^ y]
            max_len = max(max_len, len(order))
            w = float(dist.probs[x] * dist.probs[y])
            z = x
            routed = w
            for e in order:
                load[z, e] += w
                z ^= 1 << e
            assert z == y
            flow_residual = max(flow_residual,
                                abs(routed - float(dist.probs[x] * dist.probs[y])))

    eta4 = s.eta_min ** -4
    rho = 0.0
    max_tr = (0, 0)
    load_ok = True
    for z in range(size):
        for e in range(g.m):
            z2 = z ^ (1 << e)
            if load[z, e] == 0.0:
                continue
            cap = eta4 * min(float(dist.probs[z]), float(dist.probs[z2]))
            if load[z, e] > cap + 1e-12:
                load_ok = False
            if cm.P[z, z2] > 0.0:
                val = max_len * load[z, e] / (float(dist.probs[z]) * cm.P[z, z2])
                if val > rho:
                    rho = val
                    max_tr = (z, z2)
    gap = spectral(cm).gap
    return CongestionReport(rho=rho, max_length=max_len,
                            max_load_transition=max_tr, gap=gap,
                            load_bound_ok=load_ok, flow_residual=flow_residual)
