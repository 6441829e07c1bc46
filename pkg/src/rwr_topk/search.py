"""Exact top-k search: BFS layering, upper-bound pruning, candidate heap.

Nodes are visited in ascending (layer, id) order over the direction of
probability flow.  Each visit gets an O(1) incremental upper bound on
its proximity; once the bound (and the worst-case bound of every node
still unvisited) drops below the K-th best candidate, the search stops
and the candidate set is provably the exact answer.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .engine import prepare_query, proximity_of
from .errors import ParameterError, VisitOrderError
from .graph import NormalizedMatrix

__all__ = [
    "BfsTree",
    "EstimatorState",
    "QueryResult",
    "VisitRecord",
    "build_bfs",
    "c_prime",
    "estimate_direct",
    "estimate_incremental",
    "topk_search",
]


@dataclass(frozen=True)
class BfsTree:
    """Hop layers from the query node; unreachable nodes have layer -1."""

    root: int
    layer: np.ndarray
    visit_order: np.ndarray


def build_bfs(a: NormalizedMatrix, q: int) -> BfsTree:
    """BFS along particle movement (v to u when A[u][v] != 0).

    Within a layer nodes are listed in ascending id.
    """
    layer = np.full(a.n, -1, dtype=np.int64)
    layer[q] = 0
    order = [q]
    frontier = [q]
    depth = 0
    while frontier:
        depth += 1
        found = set()
        for v in frontier:
            for u in a.out_neighbors(v):
                if layer[u] < 0:
                    found.add(int(u))
        frontier = sorted(found)
        for u in frontier:
            layer[u] = depth
        order.extend(frontier)
    return BfsTree(root=q, layer=layer, visit_order=np.array(order, dtype=np.int64))


def c_prime(self_loop: float, c: float) -> float:
    """Per-node restart factor (1-c)/(1 - A_uu + c A_uu)."""
    return (1.0 - c) / (1.0 - self_loop + c * self_loop)


@dataclass
class EstimatorState:
    """The three additive bound terms, folded forward one visit at a time.

    ``term3`` always equals (1 - selected probability mass) times the
    global maximum transition probability.
    """

    term1: float = 0.0
    term2: float = 0.0
    term3: float = 0.0
    selected_mass: float = 0.0
    last_node: int = -1
    last_layer: int = -1

    def total(self) -> float:
        return self.term1 + self.term2 + self.term3


def estimate_direct(selected, a: NormalizedMatrix, c: float, u: int, layer_u: int, q: int) -> float:
    """Literal evaluation of the upper bound from the full selected set.

    ``selected`` lists (node, layer, proximity) for every node whose
    exact proximity was computed before visiting ``u``.  Kept as the
    independent O(n) reference for the O(1) incremental path.
    """
    if u == q:
        return 1.0
    prev_layer = same_layer = 0.0
    mass = 0.0
    for v, lv, pv in selected:
        mass += pv
        if lv == layer_u - 1:
            prev_layer += pv * a.col_max[v]
        elif lv == layer_u:
            same_layer += pv * a.col_max[v]
    a_uu = _self_loop(a, u)
    return c_prime(a_uu, c) * (prev_layer + same_layer + (1.0 - mass) * a.global_max)


def _self_loop(a: NormalizedMatrix, u: int) -> float:
    rows, vals = a.column(u)
    k = np.searchsorted(rows, u)
    if k < rows.size and rows[k] == u:
        return float(vals[k])
    return 0.0


def estimate_incremental(
    state: EstimatorState,
    u: int,
    layer_u: int,
    prev_p: float,
    a: NormalizedMatrix,
    c: float,
    q: int,
    self_loop_u: float | None = None,
) -> tuple[float, EstimatorState]:
    """Advance the bound terms from the previously selected node to u.

    ``state.last_node`` must be the node visited immediately before u
    and ``prev_p`` its exact proximity.
    """
    prev, prev_layer = state.last_node, state.last_layer
    if prev < 0:
        raise VisitOrderError("estimator advanced before any node was selected")
    gmax = a.global_max
    if prev == q:
        t1 = prev_p * a.col_max[q]
        t2 = 0.0
        t3 = (1.0 - prev_p) * gmax
        if layer_u not in (prev_layer, prev_layer + 1):
            raise VisitOrderError(f"layer jump {prev_layer} -> {layer_u}")
    elif layer_u == prev_layer:
        t1 = state.term1
        t2 = state.term2 + prev_p * a.col_max[prev]
        t3 = (state.term3 / gmax - prev_p) * gmax if gmax > 0 else 0.0
    elif layer_u == prev_layer + 1:
        t1 = state.term2 + prev_p * a.col_max[prev]
        t2 = 0.0
        t3 = (state.term3 / gmax - prev_p) * gmax if gmax > 0 else 0.0
    else:
        raise VisitOrderError(f"layer jump {prev_layer} -> {layer_u}")
    new_state = EstimatorState(
        term1=t1,
        term2=t2,
        term3=t3,
        selected_mass=state.selected_mass + prev_p,
        last_node=u,
        last_layer=layer_u,
    )
    if self_loop_u is None:
        self_loop_u = _self_loop(a, u)
    return c_prime(self_loop_u, c) * new_state.total(), new_state


@dataclass(frozen=True)
class VisitRecord:
    node: int
    layer: int
    estimate: float
    proximity: float | None  # None when the visit terminated the search
    theta_before: float


@dataclass(frozen=True)
class QueryResult:
    ranked: list[tuple[int, float]]
    stats: dict
    trace: list[VisitRecord] = field(default_factory=list)


def topk_search(
    idx,
    a: NormalizedMatrix,
    q: int,
    k: int,
    pruning: bool = True,
    collect_trace: bool = False,
) -> QueryResult:
    """Exact K highest-proximity nodes for query q.

    With pruning enabled the search stops at the first visit whose
    upper bound (adjusted for the largest restart factor any remaining
    node could have) falls below the current K-th candidate proximity.
    With pruning disabled every reachable node's proximity is computed.
    """
    if k < 1:
        raise ParameterError(f"K must be >= 1, got {k}")
    tree = build_bfs(a, q)
    ws = prepare_query(idx, q)
    diag = idx.diag
    c = idx.c
    # worst-case restart factor over non-query nodes: self-loops enlarge
    # c' and would otherwise let a pruned node's bound exceed theta
    others = np.delete(np.arange(a.n), q) if a.n > 1 else np.array([], dtype=int)
    cpr_ceiling = float(np.max(c_prime(diag[others], c))) if others.size else c_prime(0.0, c)

    heap: list[tuple[float, int, int]] = [(0.0, 1, -1)] * k  # K dummies
    heapq.heapify(heap)
    theta = 0.0
    trace: list[VisitRecord] = []
    state = EstimatorState()
    computed = 0
    pruned_at = -1
    seq = 0
    prev_p = 0.0

    for u in tree.visit_order:
        u = int(u)
        layer_u = int(tree.layer[u])
        if u == q:
            est = 1.0
            state = EstimatorState(last_node=q, last_layer=0)
        else:
            est, state = estimate_incremental(
                state, u, layer_u, prev_p, a, c, q, self_loop_u=float(diag[u])
            )
            if pruning and est < theta and cpr_ceiling * state.total() < theta:
                pruned_at = layer_u
                if collect_trace:
                    trace.append(VisitRecord(u, layer_u, est, None, theta))
                break
        p_u = proximity_of(idx, ws, u)
        computed += 1
        if collect_trace:
            trace.append(VisitRecord(u, layer_u, est, p_u, theta))
        if p_u > theta:
            # later-visited entries sort below earlier ones at equal
            # proximity, so ties at theta evict the newest candidate
            heapq.heapreplace(heap, (p_u, -seq, u))
            theta = heap[0][0]
        prev_p = p_u
        seq += 1

    ranked = [(node, p) for p, _, node in heap if node >= 0]
    ranked.sort(key=lambda t: (-t[1], t[0]))
    stats = {
        "nodes_visited": seq + (1 if pruned_at >= 0 else 0),
        "proximities_computed": computed,
        "pruned_at_layer": pruned_at if pruned_at >= 0 else None,
        "reachable": int(tree.visit_order.size),
    }
    return QueryResult(ranked=ranked, stats=stats, trace=trace)
