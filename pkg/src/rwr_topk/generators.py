"""Seeded graph generators so benchmarks and tests need no downloads."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .graph import Graph, graph_from_edges

__all__ = ["erdos_renyi", "planted_partition", "star", "path", "write_edge_list"]


def _weights(rng, count, weighted):
    if weighted:
        return rng.uniform(0.1, 1.0, size=count)
    return np.ones(count)


def erdos_renyi(
    n: int,
    m: int,
    seed: int = 0,
    weighted: bool = False,
    self_loops: bool = False,
) -> Graph:
    """m distinct directed edges sampled uniformly.

    With ``self_loops`` roughly 5% of the edges are loops.
    """
    if m > n * (n - 1):
        raise ParameterError("too many edges requested")
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    n_loops = max(1, m // 20) if self_loops and m else 0
    while len(pairs) < m - n_loops:
        s = int(rng.integers(n))
        d = int(rng.integers(n))
        if s != d:
            pairs.add((s, d))
    while len(pairs) < m:
        u = int(rng.integers(n))
        pairs.add((u, u))
    ordered = sorted(pairs)
    w = _weights(rng, len(ordered), weighted)
    return graph_from_edges(n, [(s, d, w[i]) for i, (s, d) in enumerate(ordered)])


def planted_partition(
    n: int,
    blocks: int,
    p_in: float,
    p_out: float,
    seed: int = 0,
    weighted: bool = False,
) -> Graph:
    """Stochastic block model; each undirected edge is emitted both ways."""
    rng = np.random.default_rng(seed)
    assign = np.arange(n) % blocks
    edges = []
    for u in range(n):
        vs = np.arange(u + 1, n)
        p = np.where(assign[vs] == assign[u], p_in, p_out)
        sel = vs[rng.random(vs.size) < p]
        for v in sel:
            w = float(rng.uniform(0.1, 1.0)) if weighted else 1.0
            edges.append((u, int(v), w))
            edges.append((int(v), u, w))
    return graph_from_edges(n, edges)


def star(n: int, seed: int = 0) -> Graph:
    """Center node 0 connected both ways to every leaf."""
    edges = []
    for leaf in range(1, n):
        edges.append((0, leaf, 1.0))
        edges.append((leaf, 0, 1.0))
    return graph_from_edges(n, edges)


def path(n: int, seed: int = 0) -> Graph:
    """Undirected path 0 - 1 - ... - n-1 as paired directed edges."""
    edges = []
    for u in range(n - 1):
        edges.append((u, u + 1, 1.0))
        edges.append((u + 1, u, 1.0))
    return graph_from_edges(n, edges)


def write_edge_list(g: Graph, path) -> None:
    labels = g.labels
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes={g.n} edges={g.m}\n")
        for s, d, w in g.edges:
            if w == 1.0:
                fh.write(f"{labels[s]} {labels[d]}\n")
            else:
                fh.write(f"{labels[s]} {labels[d]} {w!r}\n")
