"""Benchmark driver: one row per (ordering, seed, K) configuration.

Measures the precompute side (inverse-factor fill relative to the edge
count, build time) and the query side (mean latency, mean exact
proximity computations, speedup from pruning).
"""

from __future__ import annotations

import csv
import statistics
import time

import numpy as np

from .graph import Graph, column_normalize
from .index import precompute
from .search import topk_search

__all__ = ["BENCH_FIELDS", "run_bench", "write_csv"]

BENCH_FIELDS = [
    "ordering",
    "seed",
    "k",
    "n",
    "m",
    "kappa",
    "nnz_linv",
    "nnz_uinv",
    "nnz_ratio",
    "precompute_s",
    "mean_query_ms",
    "mean_query_ms_noprune",
    "mean_computed",
    "mean_computed_noprune",
    "pruning_speedup",
]


def run_bench(
    g: Graph,
    c: float = 0.95,
    k_list=(5,),
    orderings=("degree", "cluster", "hybrid", "random"),
    seeds=(0,),
    n_queries: int = 10,
    pruning: bool = True,
) -> list[dict]:
    """Build an index per (ordering, seed) and time queries per K.

    Query nodes are drawn per seed, identically across orderings, so
    rows are comparable.  The no-pruning column is always measured; the
    ``pruning`` flag only controls whether the pruned run happens too.
    """
    a = column_normalize(g)
    rows = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        queries = [int(q) for q in rng.integers(0, g.n, size=n_queries)]
        for ordering in orderings:
            idx, stats = precompute(g, c=c, strategy=ordering, seed=seed)
            for k in k_list:
                t_prune, comp_prune = [], []
                t_plain, comp_plain = [], []
                for q in queries:
                    t0 = time.perf_counter()
                    res_off = topk_search(idx, a, q, k, pruning=False)
                    t_plain.append((time.perf_counter() - t0) * 1e3)
                    comp_plain.append(res_off.stats["proximities_computed"])
                    if pruning:
                        t0 = time.perf_counter()
                        res_on = topk_search(idx, a, q, k, pruning=True)
                        t_prune.append((time.perf_counter() - t0) * 1e3)
                        comp_prune.append(res_on.stats["proximities_computed"])
                mean_on = statistics.mean(t_prune) if t_prune else float("nan")
                mean_off = statistics.mean(t_plain)
                rows.append(
                    {
                        "ordering": ordering,
                        "seed": seed,
                        "k": k,
                        "n": g.n,
                        "m": g.m,
                        "kappa": stats.kappa,
                        "nnz_linv": stats.nnz_linv,
                        "nnz_uinv": stats.nnz_uinv,
                        "nnz_ratio": round(stats.nnz_ratio, 6),
                        "precompute_s": round(stats.seconds, 6),
                        "mean_query_ms": round(mean_on, 6),
                        "mean_query_ms_noprune": round(mean_off, 6),
                        "mean_computed": round(statistics.mean(comp_prune), 3)
                        if comp_prune
                        else float("nan"),
                        "mean_computed_noprune": round(statistics.mean(comp_plain), 3),
                        "pruning_speedup": round(mean_off / mean_on, 4)
                        if t_prune and mean_on > 0
                        else float("nan"),
                    }
                )
    return rows


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
