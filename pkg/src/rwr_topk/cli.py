"""Command-line interface: precompute / query / oracle / bench / gen."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import generators
from .engine import iterative_rwr
from .errors import RwrError, UnknownNodeError
from .graph import column_normalize, load_edge_list
from .index import STRATEGIES, load_index, precompute, save_index
from .reorder import cluster_reorder, hybrid_reorder
from .search import topk_search

EXIT_GENERIC = 1
EXIT_UNKNOWN_NODE = 2
EXIT_NO_CONVERGENCE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit code 2 reserved for unknown nodes
        self.print_usage(sys.stderr)
        self.exit(EXIT_GENERIC, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="rwr-topk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("precompute", parents=[], help="build and save a proximity index")
    p.add_argument("--graph", required=True, help="edge-list file: 'src dst [weight]'")
    p.add_argument("--out", required=True, help="index output path")
    p.add_argument("--c", type=float, default=0.95, help="restart probability (default 0.95)")
    p.add_argument("--order", choices=STRATEGIES, default="hybrid")
    p.add_argument("--drop-tol", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0, help="seed for the random ordering")
    p.add_argument("--partition-out", help="write 'node_id partition_id' lines (cluster/hybrid)")

    p = sub.add_parser("query", help="top-K nodes from a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--node", required=True, help="query node label")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--no-prune", action="store_true")

    p = sub.add_parser("oracle", help="top-K via the iterative fixed point")
    p.add_argument("--graph", required=True)
    p.add_argument("--node", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=10_000)

    p = sub.add_parser("bench", help="CSV report plus figures over orderings and seeds")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--c", type=float, default=0.95)
    p.add_argument("--k", type=int, nargs="+", default=[5])
    p.add_argument("--orders", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--no-prune", action="store_true", help="skip the pruned measurement")
    p.add_argument("--no-figures", action="store_true")

    p = sub.add_parser("gen", help="write a seeded benchmark graph as an edge list")
    p.add_argument("--kind", choices=["er", "planted", "star", "path"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, help="edge count (er)")
    p.add_argument("--blocks", type=int, default=10)
    p.add_argument("--p-in", type=float, default=0.05)
    p.add_argument("--p-out", type=float, default=0.002)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--self-loops", action="store_true")
    return parser


def _print_ranked(ranked, labels):
    for rank, (u, p) in enumerate(ranked, start=1):
        print(f"{rank}\t{labels[u]}\t{p:.12g}")


def _cmd_precompute(args) -> int:
    g = load_edge_list(args.graph)
    idx, stats = precompute(
        g, c=args.c, strategy=args.order, drop_tol=args.drop_tol, seed=args.seed
    )
    save_index(idx, args.out)
    kappa = stats.kappa if stats.kappa >= 0 else "-"
    print(
        f"n={stats.n} m={stats.m} kappa={kappa} "
        f"nnz_linv={stats.nnz_linv} nnz_uinv={stats.nnz_uinv} "
        f"nnz_ratio={stats.nnz_ratio:.4g} wall_s={stats.seconds:.3f}"
    )
    if args.partition_out:
        if args.order not in ("cluster", "hybrid"):
            print("partition export requires --order cluster or hybrid", file=sys.stderr)
            return EXIT_GENERIC
        reorder_fn = cluster_reorder if args.order == "cluster" else hybrid_reorder
        _, part = reorder_fn(g)
        labels = g.labels
        with open(args.partition_out, "w", encoding="utf-8") as fh:
            for u in range(g.n):
                fh.write(f"{labels[u]} {int(part.assign[u])}\n")
    return 0


def _cmd_query(args) -> int:
    idx = load_index(args.index)
    q = idx.node_id(args.node)
    res = topk_search(idx, idx.matrix, q, args.k, pruning=not args.no_prune)
    _print_ranked(res.ranked, idx.labels)
    stats = res.stats
    layer = stats["pruned_at_layer"]
    print(
        f"# visited={stats['nodes_visited']} computed={stats['proximities_computed']} "
        f"terminated_at_layer={layer if layer is not None else '-'}"
    )
    return 0


def _cmd_oracle(args) -> int:
    g = load_edge_list(args.graph)
    if args.node not in g.id_map:
        raise UnknownNodeError(f"unknown node label {args.node!r}")
    a = column_normalize(g)
    pv = iterative_rwr(a, g.id_map[args.node], args.c, tol=args.tol, max_iter=args.max_iter)
    if not pv.converged:
        print(f"no convergence after {pv.iterations} iterations", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    labels = g.labels
    ranked = [(u, p) for u, p in pv.topk(args.k) if p > 0.0]
    _print_ranked(ranked, labels)
    print(f"# iterations={pv.iterations}")
    return 0


def _cmd_bench(args) -> int:
    g = load_edge_list(args.graph)
    rows = bench_mod.run_bench(
        g,
        c=args.c,
        k_list=args.k,
        orderings=args.orders,
        seeds=args.seeds,
        n_queries=args.queries,
        pruning=not args.no_prune,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "bench.csv"
    bench_mod.write_csv(rows, csv_path)
    print(f"wrote {csv_path}")
    if not args.no_figures:
        from .plots import render_bench_figures

        for fig_path in render_bench_figures(rows, outdir):
            print(f"wrote {fig_path}")
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "er":
        m = args.m if args.m is not None else 5 * args.n
        g = generators.erdos_renyi(
            args.n, m, seed=args.seed, weighted=args.weighted, self_loops=args.self_loops
        )
    elif args.kind == "planted":
        g = generators.planted_partition(
            args.n, args.blocks, args.p_in, args.p_out, seed=args.seed, weighted=args.weighted
        )
    elif args.kind == "star":
        g = generators.star(args.n)
    else:
        g = generators.path(args.n)
    generators.write_edge_list(g, args.out)
    print(f"wrote {args.out} (n={g.n}, m={g.m})")
    return 0


_COMMANDS = {
    "precompute": _cmd_precompute,
    "query": _cmd_query,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UnknownNodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_NODE
    except (RwrError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERIC


if __name__ == "__main__":
    sys.exit(main())
