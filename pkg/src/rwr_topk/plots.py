"""Figure rendering for bench reports.

Figures are written next to the delimited output; all rendering uses
the Agg backend so the bench runs headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_bench_figures"]


def _by_ordering(rows, field):
    out: dict[str, list[float]] = {}
    for row in rows:
        val = row[field]
        if val == val:  # skip NaN
            out.setdefault(row["ordering"], []).append(float(val))
    return out


def _mean(vals):
    return sum(vals) / len(vals)


def render_bench_figures(rows: list[dict], outdir) -> list[Path]:
    """Render fill-ratio, computation-count, and latency figures.

    Returns the list of written paths.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    ratios = _by_ordering(rows, "nnz_ratio")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = list(ratios)
    ax.bar(names, [_mean(ratios[o]) for o in names], color="#4878b0")
    ax.set_ylabel("nnz(inverse factors) / m")
    ax.set_title("Inverse-factor fill by ordering")
    fig.tight_layout()
    p = outdir / "nnz_ratio.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)

    comp_on = _by_ordering(rows, "mean_computed")
    comp_off = _by_ordering(rows, "mean_computed_noprune")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = list(comp_off)
    xs = range(len(names))
    width = 0.38
    ax.bar([x - width / 2 for x in xs], [_mean(comp_off[o]) for o in names],
           width, label="no pruning", color="#c44e52")
    if comp_on:
        ax.bar([x + width / 2 for x in xs],
               [_mean(comp_on.get(o, [float("nan")])) for o in names],
               width, label="pruning", color="#55a868")
    ax.set_xticks(list(xs), names)
    ax.set_ylabel("mean exact proximity computations")
    ax.set_title("Pruning effect on computation count")
    ax.legend()
    fig.tight_layout()
    p = outdir / "pruning.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)

    lat_on = _by_ordering(rows, "mean_query_ms")
    lat_off = _by_ordering(rows, "mean_query_ms_noprune")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = list(lat_off)
    xs = range(len(names))
    ax.bar([x - width / 2 for x in xs], [_mean(lat_off[o]) for o in names],
           width, label="no pruning", color="#c44e52")
    if lat_on:
        ax.bar([x + width / 2 for x in xs],
               [_mean(lat_on.get(o, [float("nan")])) for o in names],
               width, label="pruning", color="#55a868")
    ax.set_xticks(list(xs), names)
    ax.set_ylabel("mean query time [ms]")
    ax.set_title("Query latency by ordering")
    ax.legend()
    fig.tight_layout()
    p = outdir / "query_time.png"
    fig.savefig(p, dpi=150)
    plt.close(fig)
    written.append(p)
    return written
