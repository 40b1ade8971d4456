"""Built-in graph generators, mostly for self-contained verification suites."""

from __future__ import annotations

import numpy as np

from .model import WeightedGraph


def _expand(value, count):
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return np.full(count, float(arr))
    if arr.shape != (count,):
        raise ValueError(f"expected scalar or {count} values")
    return arr


def k2(beta=2.0, lam=1.0) -> WeightedGraph:
    """Single edge on two vertices; the smallest nontrivial instance."""
    return WeightedGraph(2, [(0, 1)], _expand(lam, 2), _expand(beta, 1))


def path_graph(n, beta=2.0, lam=1.0) -> WeightedGraph:
    edges = [(i, i + 1) for i in range(n - 1)]
    return WeightedGraph(n, edges, _expand(lam, n), _expand(beta, len(edges)))


def cycle_graph(n, beta=2.0, lam=1.0) -> WeightedGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return WeightedGraph(n, edges, _expand(lam, n), _expand(beta, len(edges)))


def complete_graph(n, beta=2.0, lam=1.0) -> WeightedGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return WeightedGraph(n, edges, _expand(lam, n), _expand(beta, len(edges)))


def grid_graph(rows, cols, beta=2.0, lam=1.0) -> WeightedGraph:
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return WeightedGraph(n, edges, _expand(lam, n), _expand(beta, len(edges)))


def erdos_renyi(n, prob, seed, beta=2.0, lam=1.0) -> WeightedGraph:
    """G(n, p); resamples until at least one edge exists."""
    gen = np.random.default_rng(seed)
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if gen.random() < prob]
        if edges:
            return WeightedGraph(n, edges, _expand(lam, n),
                                 _expand(beta, len(edges)))


def random_instance(gen: np.random.Generator, n_max=5, m_max=8,
                    beta_high=5.0, lam_low=0.05, unit_field_share=0.25,
                    n_min=2) -> WeightedGraph:
    """Random connected-or-not instance with heterogeneous parameters.

    beta uniform in (1, beta_high], lambda uniform in [lam_low, 1] with a
    ``unit_field_share`` chance of being exactly 1 (the zero-penalty corner
    the couplings must also handle).
    """
    n = int(gen.integers(n_min, n_max + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    gen.shuffle(pairs)
    m = int(gen.integers(1, min(m_max, len(pairs)) + 1))
    edges = pairs[:m]
    beta = 1.0 + gen.uniform(1e-3, beta_high - 1.0, size=m)
    lam = gen.uniform(lam_low, 1.0, size=n)
    lam[gen.random(n) < unit_field_share] = 1.0
    return WeightedGraph(n, edges, lam, beta)
