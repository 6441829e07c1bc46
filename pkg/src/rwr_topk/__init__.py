"""Exact top-k random walk with restart proximity search.

Precompute side: community-aware node reordering, sparse LU
factorization, and exact inverse triangular factors persisted in a
checksummed binary index.  Query side: BFS-ordered visits with an O(1)
upper-bound estimator that prunes the tail of the graph while keeping
the returned top-k provably exact.
"""

from .engine import full_vector, iterative_rwr, prepare_query, proximity_of
from .graph import (
    Graph,
    NormalizedMatrix,
    Ordering,
    apply_ordering,
    column_normalize,
    load_edge_list,
)
from .index import ProximityIndex, load_index, precompute, save_index
from .lu import build_system, crout_lu, invert_lower, invert_upper
from .reorder import (
    Partitioning,
    cluster_reorder,
    degree_reorder,
    hybrid_reorder,
    louvain_partition,
    random_reorder,
)
from .search import build_bfs, estimate_direct, estimate_incremental, topk_search

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "NormalizedMatrix",
    "Ordering",
    "Partitioning",
    "ProximityIndex",
    "apply_ordering",
    "build_bfs",
    "build_system",
    "cluster_reorder",
    "column_normalize",
    "crout_lu",
    "degree_reorder",
    "estimate_direct",
    "estimate_incremental",
    "full_vector",
    "hybrid_reorder",
    "invert_lower",
    "invert_upper",
    "iterative_rwr",
    "load_edge_list",
    "load_index",
    "louvain_partition",
    "precompute",
    "prepare_query",
    "proximity_of",
    "random_reorder",
    "save_index",
    "topk_search",
]
