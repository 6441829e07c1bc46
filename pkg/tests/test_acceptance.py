"""End-to-end acceptance checks.

Each test prints a single ``CRITERION n: PASS/FAIL`` line (run with
``pytest -s`` to see them all) and asserts the same condition, so the
suite doubles as a readable report.  The shared campaign fixture runs
the exactness workload once and the individual criteria inspect its
recorded traces.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import pytest

from rwr_topk.engine import iterative_rwr
from rwr_topk.errors import IndexFormatError
from rwr_topk.generators import erdos_renyi, planted_partition
from rwr_topk.graph import apply_ordering, column_normalize, graph_from_edges
from rwr_topk.index import load_index, precompute, save_index
from rwr_topk.lu import build_system, crout_lu, invert_lower, invert_upper
from rwr_topk.reorder import cluster_reorder, hybrid_reorder, random_reorder
from rwr_topk.search import c_prime, estimate_direct, topk_search

SET_TIE_TOL = 1e-9
VALUE_TOL = 1e-8


def report(num: int, ok: bool, detail: str) -> None:
    print(f"\nCRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


@dataclass
class SearchRecord:
    n: int
    graph_seed: int
    self_loops: bool
    k: int
    q: int
    c: float
    trace: list
    ranked: list
    oracle: np.ndarray
    idx: object


@dataclass
class Campaign:
    seconds: float = 0.0
    n_graphs: int = 0
    searches: list = field(default_factory=list)


@pytest.fixture(scope="session")
def campaign():
    sizes = [50] * 24 + [200] * 16 + [500] * 10
    data = Campaign()
    t0 = time.perf_counter()
    for i, n in enumerate(sizes):
        weighted = i % 2 == 0
        self_loops = i % 4 < 2
        g = erdos_renyi(n, 5 * n, seed=100 + i, weighted=weighted, self_loops=self_loops)
        idx, _ = precompute(g, c=0.95, strategy="hybrid")
        rng = np.random.default_rng(i)
        queries = rng.choice(n, size=10, replace=False)
        for q in queries:
            q = int(q)
            oracle = iterative_rwr(column_normalize(g), q, 0.95, tol=1e-12)
            assert oracle.converged
            for k in (1, 5, 10):
                res = topk_search(idx, idx.matrix, q, k, pruning=True, collect_trace=True)
                data.searches.append(
                    SearchRecord(
                        n=n,
                        graph_seed=100 + i,
                        self_loops=self_loops,
                        k=k,
                        q=q,
                        c=0.95,
                        trace=res.trace,
                        ranked=res.ranked,
                        oracle=oracle.values,
                        idx=idx,
                    )
                )
        data.n_graphs += 1
    data.seconds = time.perf_counter() - t0
    return data


@pytest.fixture(scope="session")
def planted_indexes():
    """Hybrid and random indexes over planted-partition graphs, 5 seeds."""
    out = []
    for seed in range(5):
        g = planted_partition(1000, 10, 0.05, 0.002, seed=seed)
        hybrid, _ = precompute(g, strategy="hybrid")
        rand, _ = precompute(g, strategy="random", seed=seed)
        out.append((g, hybrid, rand))
    return out


def test_criterion_1_exactness(campaign):
    mismatched = 0
    worst_value_gap = 0.0
    for rec in campaign.searches:
        order = np.lexsort((np.arange(rec.n), -rec.oracle))
        expect = [int(u) for u in order if rec.oracle[u] > 0.0][: rec.k]
        got = [u for u, _ in rec.ranked]
        if set(got) != set(expect):
            threshold = rec.oracle[expect[-1]] if expect else 0.0
            diff = set(got) ^ set(expect)
            if any(abs(rec.oracle[u] - threshold) > SET_TIE_TOL for u in diff):
                mismatched += 1
                continue
        for u, p in rec.ranked:
            worst_value_gap = max(worst_value_gap, abs(p - rec.oracle[u]))
    ok = (
        mismatched == 0
        and worst_value_gap <= VALUE_TOL
        and campaign.seconds < 60.0
        and campaign.n_graphs >= 50
    )
    report(
        1,
        ok,
        f"{campaign.n_graphs} graphs, {len(campaign.searches)} searches, "
        f"{mismatched} set mismatches, max value gap {worst_value_gap:.2e}, "
        f"runtime {campaign.seconds:.1f}s (< 60s required)",
    )


def test_criterion_2_upper_bound(campaign):
    violations = 0
    worst = 0.0
    checked = 0
    for rec in campaign.searches:
        for v in rec.trace:
            if v.proximity is None:
                continue
            checked += 1
            gap = v.proximity - v.estimate
            if gap > 1e-12:
                violations += 1
                worst = max(worst, gap)
    report(
        2,
        violations == 0,
        f"{checked} computed nodes across all searches, {violations} bound "
        f"violations (worst {worst:.2e})",
    )


def test_criterion_3_layer_monotonicity(campaign):
    violations = 0
    same_layer = 0
    worst = 0.0
    loop_free_violations = 0
    checked = 0
    for rec in campaign.searches:
        ests = [(v.layer, v.estimate) for v in rec.trace if v.node != rec.q]
        for (la, ea), (lb, eb) in zip(ests, ests[1:]):
            checked += 1
            if eb > ea + 1e-12:
                violations += 1
                worst = max(worst, eb - ea)
                if la == lb:
                    same_layer += 1
                if not rec.self_loops:
                    loop_free_violations += 1
    detail = (
        f"{checked} consecutive visit pairs, {violations} monotonicity "
        f"violations (worst {worst:.2e}; {same_layer} within a layer; "
        f"{loop_free_violations} on self-loop-free graphs)"
    )
    if violations:
        detail += (
            "; violations occur only when self-loops give nodes different "
            "restart factors, which breaks the claimed ordering of the "
            "estimates even though each one is still a valid upper bound; "
            "the search compensates with a worst-case-factor termination "
            "guard, so exactness (criteria 1, 2, 8) is unaffected"
        )
    report(3, violations == 0, detail)


def test_criterion_4_incremental_equals_direct(campaign):
    worst = 0.0
    checked = 0
    for rec in campaign.searches:
        a = rec.idx.matrix
        selected = []
        for v in rec.trace:
            if v.node != rec.q:
                checked += 1
                direct = estimate_direct(selected, a, rec.c, v.node, v.layer, rec.q)
                worst = max(worst, abs(v.estimate - direct))
            if v.proximity is not None:
                selected.append((v.node, v.layer, v.proximity))
    report(
        4,
        worst <= 1e-10,
        f"{checked} visits re-derived from scratch, max |incremental - direct| "
        f"= {worst:.2e} (tol 1e-10)",
    )


def test_criterion_5_lu_correctness():
    worst_lu = worst_l = worst_u = 0.0
    count = 0
    for i in range(100):
        n = (20, 50, 100, 200)[i % 4]
        g = erdos_renyi(n, 5 * n, seed=500 + i, weighted=(i % 2 == 0), self_loops=(i % 4 < 2))
        a = column_normalize(g)
        ordering, _ = hybrid_reorder(g)
        w = build_system(apply_ordering(a, ordering), 0.95)
        lo, up = crout_lu(w)
        eye = np.eye(n)
        ld, ud = lo.to_scipy(), up.to_scipy()
        worst_lu = max(worst_lu, np.max(np.abs((ld @ ud - w.to_scipy()).toarray())))
        worst_l = max(worst_l, np.max(np.abs((ld @ invert_lower(lo).to_scipy()).toarray() - eye)))
        worst_u = max(worst_u, np.max(np.abs((ud @ invert_upper(up).to_scipy()).toarray() - eye)))
        count += 1
    ok = count == 100 and max(worst_lu, worst_l, worst_u) <= 1e-10
    report(
        5,
        ok,
        f"{count} factorizations; max residuals: |LU-W| {worst_lu:.2e}, "
        f"|L L^-1 - I| {worst_l:.2e}, |U U^-1 - I| {worst_u:.2e} (tol 1e-10)",
    )


def test_criterion_6_reordering_sparsity(planted_indexes):
    hybrid_nnz = [h.nnz for _, h, _ in planted_indexes]
    random_nnz = [r.nnz for _, _, r in planted_indexes]
    med_h = float(np.median(hybrid_nnz))
    med_r = float(np.median(random_nnz))
    m = planted_indexes[0][0].m
    report(
        6,
        med_h <= med_r,
        f"median nnz(L^-1)+nnz(U^-1) over 5 seeds: hybrid {med_h:.0f} "
        f"({med_h / m:.2f}x m) vs random {med_r:.0f} ({med_r / m:.2f}x m)",
    )


def test_criterion_7_block_zero():
    edges = []
    for base in (0, 8):
        edges += [
            (base + u, base + v, 1.0) for u in range(8) for v in range(8) if u != v
        ]
    g = graph_from_edges(16, edges)
    idx, _ = precompute(g, strategy="cluster")
    _, part = cluster_reorder(g)
    cross = 0
    for inv in (idx.linv, idx.uinv):
        mat = inv.to_scipy().tocoo()
        for r, col in zip(mat.row, mat.col):
            ru = idx.ordering.inv_perm[r]
            cu = idx.ordering.inv_perm[col]
            if part.assign[ru] != part.assign[cu]:
                cross += 1
    report(
        7,
        cross == 0,
        f"two disjoint 8-cliques under cluster ordering: {cross} inverse-factor "
        f"entries link the blocks (exact zeros required)",
    )


def test_criterion_8_pruning_ablation(planted_indexes):
    queries = 0
    strict_wins = 0
    identical = 0
    for seed, (g, idx, _) in enumerate(planted_indexes[:2]):
        rng = np.random.default_rng(1000 + seed)
        for q in rng.choice(g.n, size=10, replace=False):
            q = int(q)
            on = topk_search(idx, idx.matrix, q, 5, pruning=True)
            off = topk_search(idx, idx.matrix, q, 5, pruning=False)
            queries += 1
            if on.stats["proximities_computed"] < off.stats["proximities_computed"]:
                strict_wins += 1
            if on.ranked == off.ranked:
                identical += 1
    ok = strict_wins >= 0.9 * queries and identical == queries
    report(
        8,
        ok,
        f"{queries} queries on n=1000 planted graphs: pruning computed strictly "
        f"fewer proximities on {strict_wins} ({100 * strict_wins / queries:.0f}%, "
        f">=90% required); ranked lists identical on {identical}",
    )


def test_criterion_9_estimator_anchors(campaign):
    bad_root = 0
    worst = 0.0
    checked = 0
    for rec in campaign.searches:
        root = rec.trace[0]
        if root.node != rec.q or root.estimate != 1.0:
            bad_root += 1
        if len(rec.trace) < 2:
            continue
        first = rec.trace[1]
        a = rec.idx.matrix
        p_q = root.proximity
        expected = c_prime(float(rec.idx.diag[first.node]), rec.c) * (
            p_q * a.col_max[rec.q] + (1.0 - p_q) * a.global_max
        )
        worst = max(worst, abs(first.estimate - expected))
        checked += 1
    ok = bad_root == 0 and worst <= 1e-12
    report(
        9,
        ok,
        f"root estimate exactly 1.0 in all {len(campaign.searches)} searches "
        f"({bad_root} failures); first-node base case checked {checked} times, "
        f"max deviation {worst:.2e} (tol 1e-12)",
    )


def test_criterion_10_index_round_trip(tmp_path):
    g = erdos_renyi(120, 600, seed=77, weighted=True, self_loops=True)
    idx, _ = precompute(g, strategy="hybrid")
    path = tmp_path / "roundtrip.idx"
    save_index(idx, path)
    back = load_index(path)
    bit_exact = True
    for q in (0, 13, 99):
        a = topk_search(idx, idx.matrix, q, 5)
        b = topk_search(back, back.matrix, q, 5)
        if a.ranked != b.ranked or a.stats != b.stats:
            bit_exact = False
    blob = bytearray(path.read_bytes())
    blob[-5] ^= 0x01
    path.write_bytes(bytes(blob))
    try:
        load_index(path)
        rejected = False
    except IndexFormatError:
        rejected = True
    report(
        10,
        bit_exact and rejected,
        f"save/load reproduces query output bit-exactly: {bit_exact}; "
        f"corrupted checksum rejected: {rejected}",
    )
