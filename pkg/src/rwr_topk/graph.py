"""Graph loading, column normalization, and node permutations.

Graphs are directed and weighted.  External node labels are arbitrary
whitespace-free strings; internal ids are dense integers assigned in
first-appearance order.  The transition matrix is stored column-major:
column ``v`` holds the move probabilities out of node ``v``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import EdgeListParseError, GraphValidationError, ParameterError

__all__ = [
    "Graph",
    "NormalizedMatrix",
    "Ordering",
    "load_edge_list",
    "column_normalize",
    "apply_ordering",
]


@dataclass(frozen=True)
class Graph:
    """Directed weighted edge set with contiguous node ids.

    Duplicate (src, dst) pairs are merged by weight addition at load
    time, so ``edges`` holds each pair at most once.
    """

    n: int
    edges: list[tuple[int, int, float]]
    id_map: dict[str, int] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def labels(self) -> list[str]:
        out = [""] * self.n
        for label, i in self.id_map.items():
            out[i] = label
        return out

    def degrees(self) -> np.ndarray:
        """Total degree (in + out) per node; a self-loop counts twice."""
        deg = np.zeros(self.n, dtype=np.int64)
        for s, d, _ in self.edges:
            deg[s] += 1
            deg[d] += 1
        return deg

    def validate(self) -> None:
        seen = set()
        for s, d, w in self.edges:
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise GraphValidationError(f"edge ({s}, {d}) outside [0, {self.n})")
            if w <= 0:
                raise GraphValidationError(f"edge ({s}, {d}) has non-positive weight {w}")
            if (s, d) in seen:
                raise GraphValidationError(f"duplicate edge ({s}, {d}) after merge")
            seen.add((s, d))


def graph_from_edges(n: int, edges, labels=None) -> Graph:
    """Build a Graph from integer-id edges, merging duplicates by sum."""
    merged: dict[tuple[int, int], float] = {}
    order: list[tuple[int, int]] = []
    for s, d, w in edges:
        key = (int(s), int(d))
        if key in merged:
            merged[key] += float(w)
        else:
            merged[key] = float(w)
            order.append(key)
    if labels is None:
        labels = [str(i) for i in range(n)]
    id_map = {lab: i for i, lab in enumerate(labels)}
    g = Graph(n=n, edges=[(s, d, merged[(s, d)]) for s, d in order], id_map=id_map)
    g.validate()
    return g


def load_edge_list(source) -> Graph:
    """Parse whitespace-separated ``src dst [weight]`` lines into a Graph.

    ``source`` may be a path, a text stream, or a bytes stream (UTF-8).
    Lines starting with ``#`` and blank lines are skipped.  Duplicate
    edges merge by weight addition; node ids are assigned in
    first-appearance order.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    if isinstance(source, (bytes, bytearray)):
        return load_edge_list(io.StringIO(source.decode("utf-8")))
    if isinstance(source, io.RawIOBase) or (
        hasattr(source, "read") and isinstance(getattr(source, "mode", ""), str) and "b" in getattr(source, "mode", "")
    ):
        source = io.TextIOWrapper(source, encoding="utf-8")

    id_map: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}
    order: list[tuple[int, int]] = []

    def intern(label: str) -> int:
        i = id_map.get(label)
        if i is None:
            i = len(id_map)
            id_map[label] = i
        return i

    for line_no, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(line_no, f"expected 'src dst [weight]', got {line!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise EdgeListParseError(line_no, f"bad weight {parts[2]!r}") from None
        else:
            w = 1.0
        if not np.isfinite(w) or w <= 0:
            raise GraphValidationError(f"line {line_no}: non-positive weight {w}")
        key = (intern(parts[0]), intern(parts[1]))
        if key in merged:
            merged[key] += w
        else:
            merged[key] = w
            order.append(key)

    g = Graph(
        n=len(id_map),
        edges=[(s, d, merged[(s, d)]) for s, d in order],
        id_map=id_map,
    )
    g.validate()
    return g


@dataclass(frozen=True)
class NormalizedMatrix:
    """Column-stochastic (or substochastic) transition matrix in CSC form.

    ``indices``/``data`` of column ``v`` list, by ascending row, the
    probabilities of moving to each row node given current node ``v``.
    Dangling nodes (no out-edges) keep an all-zero column.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    col_max: np.ndarray
    global_max: float

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def column(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.indptr[v], self.indptr[v + 1]
        return self.indices[s:e], self.data[s:e]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def diagonal(self) -> np.ndarray:
        """Self-loop probability per node (zero if absent)."""
        diag = np.zeros(self.n)
        for v in range(self.n):
            rows, vals = self.column(v)
            k = np.searchsorted(rows, v)
            if k < rows.size and rows[k] == v:
                diag[v] = vals[k]
        return diag

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n)
        )


def column_normalize(g: Graph) -> NormalizedMatrix:
    """Divide each node's out-weights by their sum (zero column if dangling)."""
    n = g.n
    if not g.edges:
        return NormalizedMatrix(
            n=n,
            indptr=np.zeros(n + 1, dtype=np.int64),
            indices=np.zeros(0, dtype=np.int32),
            data=np.zeros(0),
            col_max=np.zeros(n),
            global_max=0.0,
        )
    src = np.fromiter((e[0] for e in g.edges), dtype=np.int64, count=g.m)
    dst = np.fromiter((e[1] for e in g.edges), dtype=np.int64, count=g.m)
    w = np.fromiter((e[2] for e in g.edges), dtype=np.float64, count=g.m)

    out_sum = np.zeros(n)
    np.add.at(out_sum, src, w)
    # sort entries into column-major (src), rows ascending within a column
    order = np.lexsort((dst, src))
    src, dst, w = src[order], dst[order], w[order]
    data = w / out_sum[src]

    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)

    col_max = np.zeros(n)
    np.maximum.at(col_max, src, data)
    return NormalizedMatrix(
        n=n,
        indptr=indptr,
        indices=dst.astype(np.int32),
        data=data,
        col_max=col_max,
        global_max=float(col_max.max(initial=0.0)),
    )


@dataclass(frozen=True)
class Ordering:
    """Permutation between original node ids and factorization positions.

    ``perm[u]`` is the position of original node ``u``; ``inv_perm[k]``
    is the original node at position ``k``.
    """

    perm: np.ndarray
    inv_perm: np.ndarray

    def __post_init__(self):
        n = self.perm.size
        if self.inv_perm.size != n or not np.array_equal(
            self.perm[self.inv_perm], np.arange(n)
        ):
            raise ParameterError("perm and inv_perm are not mutually inverse")

    @property
    def n(self) -> int:
        return int(self.perm.size)

    @staticmethod
    def identity(n: int) -> "Ordering":
        ar = np.arange(n, dtype=np.int64)
        return Ordering(perm=ar, inv_perm=ar.copy())

    @staticmethod
    def from_inv_perm(inv_perm) -> "Ordering":
        inv_perm = np.asarray(inv_perm, dtype=np.int64)
        perm = np.empty_like(inv_perm)
        perm[inv_perm] = np.arange(inv_perm.size)
        return Ordering(perm=perm, inv_perm=inv_perm)

    def inverse(self) -> "Ordering":
        return Ordering(perm=self.inv_perm.copy(), inv_perm=self.perm.copy())


def apply_ordering(m: NormalizedMatrix, o: Ordering) -> NormalizedMatrix:
    """Permute rows and columns: A'[perm(u)][perm(v)] = A[u][v].

    Values are moved, never recomputed, so a round trip through an
    ordering and its inverse is bit-exact.
    """
    if o.n != m.n:
        raise ParameterError(f"ordering size {o.n} != matrix size {m.n}")
    n = m.n
    counts = np.zeros(n + 1, dtype=np.int64)
    counts[o.perm + 1] = np.diff(m.indptr)
    indptr = np.cumsum(counts)
    indices = np.empty(m.indices.size, dtype=np.int32)
    data = np.empty(m.data.size)
    for v in range(n):
        rows, vals = m.column(v)
        new_rows = o.perm[rows]
        srt = np.argsort(new_rows, kind="stable")
        s = indptr[o.perm[v]]
        indices[s:s + rows.size] = new_rows[srt]
        data[s:s + rows.size] = vals[srt]
    col_max = np.empty(n)
    col_max[o.perm] = m.col_max
    return NormalizedMatrix(
        n=n,
        indptr=indptr,
        indices=indices,
        data=data,
        col_max=col_max,
        global_max=m.global_max,
    )
