"""Node orderings that keep the inverse triangular factors sparse.

Finding the fill-minimizing order is NP-complete, so three heuristics
are provided: degree ordering, community (cluster) ordering built on a
deterministic Louvain pass, and the hybrid of the two.  A seeded random
ordering is included purely as a baseline for benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, Ordering

__all__ = [
    "Partitioning",
    "degree_reorder",
    "louvain_partition",
    "cluster_reorder",
    "hybrid_reorder",
    "random_reorder",
    "modularity",
]


@dataclass(frozen=True)
class Partitioning:
    """Partition ids in [1, kappa+1]; kappa+1 is the border partition."""

    kappa: int
    assign: np.ndarray

    def counts(self) -> dict[int, int]:
        ids, cnt = np.unique(self.assign, return_counts=True)
        return dict(zip(ids.tolist(), cnt.tolist()))


def degree_reorder(g: Graph) -> Ordering:
    """Positions in non-decreasing total degree, ties by ascending id."""
    deg = g.degrees()
    inv_perm = np.lexsort((np.arange(g.n), deg))
    return Ordering.from_inv_perm(inv_perm)


def _symmetrize(g: Graph):
    """Undirected weighted view: neighbor weight dicts plus self-loop weights."""
    adj: list[dict[int, float]] = [dict() for _ in range(g.n)]
    self_w = np.zeros(g.n)
    for s, d, w in g.edges:
        if s == d:
            self_w[s] += w
        else:
            adj[s][d] = adj[s].get(d, 0.0) + w
            adj[d][s] = adj[d].get(s, 0.0) + w
    return adj, self_w


def modularity(g: Graph, assign) -> float:
    """Newman modularity of a node-to-community assignment.

    Evaluated on the symmetrized weighted graph; used as an independent
    check of the greedy optimizer.
    """
    adj, self_w = _symmetrize(g)
    assign = np.asarray(assign)
    k = np.array([sum(adj[u].values()) for u in range(g.n)]) + 2.0 * self_w
    m2 = k.sum()
    if m2 == 0:
        return 0.0
    q = 0.0
    for u in range(g.n):
        q += 2.0 * self_w[u] / m2
        for v, w in adj[u].items():
            if assign[u] == assign[v]:
                q += w / m2
    for c in np.unique(assign):
        q -= (k[assign == c].sum() / m2) ** 2
    return q


def _local_pass(adj, self_w, k, m2, com, com_tot):
    """One full scan of ascending-id local moves; returns move count."""
    n = len(adj)
    moves = 0
    for u in range(n):
        c_old = com[u]
        com_tot[c_old] -= k[u]
        # weight from u into each neighboring community
        k_uc: dict[int, float] = {c_old: 0.0}
        for v, w in adj[u].items():
            c = com[v]
            k_uc[c] = k_uc.get(c, 0.0) + w
        best_c, best_gain = c_old, k_uc[c_old] - com_tot[c_old] * k[u] / m2
        for c in sorted(k_uc):
            gain = k_uc[c] - com_tot[c] * k[u] / m2
            if gain > best_gain:
                best_c, best_gain = c, gain
        com_tot[best_c] += k[u]
        if best_c != c_old:
            com[u] = best_c
            moves += 1
    return moves


def louvain_partition(g: Graph) -> Partitioning:
    """Greedy two-phase modularity optimization over the symmetrized graph.

    Deterministic: nodes are scanned in ascending id, ties between
    equal-gain communities break toward the smallest community id, and
    communities are renumbered by their smallest original member.
    """
    n = g.n
    adj, self_w = _symmetrize(g)
    # node -> community, tracked through aggregation levels
    membership = np.arange(n, dtype=np.int64)
    k = np.array([sum(adj[u].values()) for u in range(n)]) + 2.0 * self_w
    m2 = float(k.sum())
    if m2 > 0:
        while True:
            nn = len(adj)
            com = list(range(nn))
            com_tot = k.copy()
            total_moves = 0
            while True:
                moves = _local_pass(adj, self_w, k, m2, com, com_tot)
                total_moves += moves
                if moves == 0:
                    break
            if total_moves == 0:
                break
            # renumber communities by smallest member id
            remap: dict[int, int] = {}
            for u in range(nn):
                if com[u] not in remap:
                    remap[com[u]] = len(remap)
            com = [remap[c] for c in com]
            membership = np.array([com[membership[u]] for u in range(n)])
            # aggregate communities into super-nodes
            nc = len(remap)
            new_adj: list[dict[int, float]] = [dict() for _ in range(nc)]
            new_self = np.zeros(nc)
            for u in range(nn):
                cu = com[u]
                new_self[cu] += self_w[u]
                for v, w in adj[u].items():
                    cv = com[v]
                    if cu == cv:
                        new_self[cu] += w / 2.0
                    else:
                        new_adj[cu][cv] = new_adj[cu].get(cv, 0.0) + w
            adj, self_w = new_adj, new_self
            k = np.array([sum(adj[u].values()) for u in range(nc)]) + 2.0 * self_w
            if nc == 1:
                break

    # renumber final communities 1..kappa by ascending smallest node id
    remap: dict[int, int] = {}
    assign = np.zeros(n, dtype=np.int64)
    for u in range(n):
        c = membership[u]
        if c not in remap:
            remap[c] = len(remap) + 1
        assign[u] = remap[c]
    return Partitioning(kappa=len(remap), assign=assign)


def _border_assign(g: Graph, part: Partitioning) -> Partitioning:
    """Move every endpoint of a cross-partition edge to partition kappa+1.

    Membership is judged once against the original Louvain assignment,
    not recursively.
    """
    assign = part.assign.copy()
    border = np.zeros(g.n, dtype=bool)
    for s, d, _ in g.edges:
        if s != d and part.assign[s] != part.assign[d]:
            border[s] = True
            border[d] = True
    assign[border] = part.kappa + 1
    return Partitioning(kappa=part.kappa, assign=assign)


def cluster_reorder(g: Graph) -> tuple[Ordering, Partitioning]:
    """Partitions 1..kappa+1 in order, nodes within a partition by id."""
    part = _border_assign(g, louvain_partition(g))
    inv_perm = np.lexsort((np.arange(g.n), part.assign))
    return Ordering.from_inv_perm(inv_perm), part


def hybrid_reorder(g: Graph) -> tuple[Ordering, Partitioning]:
    """Cluster ordering, then non-decreasing degree within each partition."""
    part = _border_assign(g, louvain_partition(g))
    deg = g.degrees()
    inv_perm = np.lexsort((np.arange(g.n), deg, part.assign))
    return Ordering.from_inv_perm(inv_perm), part


def random_reorder(g: Graph, seed: int = 0) -> Ordering:
    """Uniform random ordering; benchmark baseline only."""
    rng = np.random.default_rng(seed)
    return Ordering.from_inv_perm(rng.permutation(g.n))
