"""Sparse Crout LU factorization and exact inverse triangular factors.

Everything here is exact: no drop tolerance is applied unless asked
for, and only structurally zero entries are skipped.  Columns are
processed left to right; within a column, updates run top to bottom, so
no pivoting is needed (the system matrix is strictly diagonally
dominant per column for any restart probability in (0, 1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import FactorizationError, ParameterError
from .graph import NormalizedMatrix

__all__ = [
    "SystemMatrix",
    "TriangularFactor",
    "InverseFactor",
    "build_system",
    "crout_lu",
    "invert_lower",
    "invert_upper",
]

PIVOT_EPS = 1e-14


@dataclass(frozen=True)
class SystemMatrix:
    """W = I - (1-c) A' in CSC form over the reordered transition matrix."""

    n: int
    c: float
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.indptr[j], self.indptr[j + 1]
        return self.indices[s:e], self.data[s:e]

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))


@dataclass(frozen=True)
class TriangularFactor:
    """One triangular factor in CSC form, diagonal stored explicitly."""

    kind: str  # "lower" | "upper"
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    unit_diagonal: bool

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.indptr[j], self.indptr[j + 1]
        return self.indices[s:e], self.data[s:e]

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))


@dataclass(frozen=True)
class InverseFactor:
    """Sparse inverse of a triangular factor.

    The lower inverse is stored column-major (one query reads a single
    column); the upper inverse row-major (one proximity reads a single
    row).
    """

    kind: str  # "lower" | "upper"
    layout: str  # "csc" | "csr"
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_scipy(self):
        cls = sp.csc_matrix if self.layout == "csc" else sp.csr_matrix
        return cls((self.data, self.indices, self.indptr), shape=(self.n, self.n))


def build_system(a: NormalizedMatrix, c: float) -> SystemMatrix:
    """W = I - (1-c) A; sparse pattern of A plus a full diagonal."""
    if not (0.0 < c < 1.0):
        raise ParameterError(f"restart probability must be in (0, 1), got {c}")
    n = a.n
    cols_idx: list[np.ndarray] = []
    cols_val: list[np.ndarray] = []
    for j in range(n):
        rows, vals = a.column(j)
        k = np.searchsorted(rows, j)
        has_diag = k < rows.size and rows[k] == j
        off = -(1.0 - c) * vals
        if has_diag:
            idx = rows.copy()
            val = off
            val[k] = 1.0 - (1.0 - c) * vals[k]
        else:
            idx = np.insert(rows, k, j)
            val = np.insert(off, k, 1.0)
        cols_idx.append(idx.astype(np.int32))
        cols_val.append(val)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([ci.size for ci in cols_idx])
    return SystemMatrix(
        n=n,
        c=c,
        indptr=indptr,
        indices=np.concatenate(cols_idx) if n else np.zeros(0, dtype=np.int32),
        data=np.concatenate(cols_val) if n else np.zeros(0),
    )


def _assemble_csc(n, cols_idx, cols_val, dtype=np.int32):
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([ci.size for ci in cols_idx])
    indices = np.concatenate(cols_idx) if cols_idx else np.zeros(0, dtype=dtype)
    data = np.concatenate(cols_val) if cols_val else np.zeros(0)
    return indptr, indices.astype(dtype), data


def _drop_small(idx, val, keep, tol):
    """Drop entries at or below tol in magnitude, always keeping row `keep`."""
    mask = (np.abs(val) > tol) | (idx == keep)
    return idx[mask], val[mask]


def crout_lu(w: SystemMatrix, drop_tol: float = 0.0):
    """Factor W into unit-lower L and upper U, column by column.

    The nonzero pattern of each column is propagated structurally while
    the numeric update runs over the same entries, so structural zeros
    are never touched.
    """
    n = w.n
    x = np.zeros(n)
    mark = np.zeros(n, dtype=bool)
    l_idx: list[np.ndarray] = []  # strictly-lower rows per column
    l_val: list[np.ndarray] = []
    u_idx: list[np.ndarray] = []
    u_val: list[np.ndarray] = []
    for j in range(n):
        rows, vals = w.column(j)
        x[rows] = vals
        mark[rows] = True
        first = int(rows[0]) if rows.size else j
        for k in range(first, j):
            if mark[k]:
                li = l_idx[k]
                if li.size:
                    x[li] -= l_val[k] * x[k]
                    mark[li] = True
        pivot = x[j]
        if abs(pivot) <= PIVOT_EPS:
            raise FactorizationError(f"pivot {pivot!r} at column {j}")
        upper = np.nonzero(mark[: j + 1])[0]
        lower = np.nonzero(mark[j + 1:])[0] + (j + 1)
        uvals = x[upper].copy()
        lvals = x[lower] / pivot
        if drop_tol > 0.0:
            upper, uvals = _drop_small(upper, uvals, j, drop_tol)
            lower, lvals = _drop_small(lower, lvals, -1, drop_tol)
        u_idx.append(upper)
        u_val.append(uvals)
        l_idx.append(lower)
        l_val.append(lvals)
        x[upper] = 0.0
        x[lower] = 0.0
        mark[upper] = False
        mark[lower] = False

    lp, li, lv = _assemble_csc(
        n,
        [np.concatenate(([j], l_idx[j])) for j in range(n)],
        [np.concatenate(([1.0], l_val[j])) for j in range(n)],
    )
    up, ui, uv = _assemble_csc(n, u_idx, u_val)
    lower_factor = TriangularFactor(
        kind="lower", n=n, indptr=lp, indices=li, data=lv, unit_diagonal=True
    )
    upper_factor = TriangularFactor(
        kind="upper", n=n, indptr=up, indices=ui, data=uv, unit_diagonal=False
    )
    return lower_factor, upper_factor


def invert_lower(l: TriangularFactor, drop_tol: float = 0.0) -> InverseFactor:
    """Columns of L^-1 by forward substitution on unit-lower L.

    Column j solves L x = e_j; the scan touches only structurally
    reachable rows at or below j.
    """
    if l.kind != "lower" or not l.unit_diagonal:
        raise ParameterError("invert_lower requires a unit-lower factor")
    n = l.n
    # strictly-lower part per column (diagonal is the first CSC entry)
    subs = [l.column(j) for j in range(n)]
    sub_idx = [s[0][1:] for s in subs]
    sub_val = [s[1][1:] for s in subs]
    x = np.zeros(n)
    mark = np.zeros(n, dtype=bool)
    cols_idx: list[np.ndarray] = []
    cols_val: list[np.ndarray] = []
    for j in range(n):
        x[j] = 1.0
        mark[j] = True
        for k in range(j, n):
            if mark[k]:
                li = sub_idx[k]
                if li.size:
                    x[li] -= sub_val[k] * x[k]
                    mark[li] = True
        pat = np.nonzero(mark[j:])[0] + j
        vals = x[pat].copy()
        if drop_tol > 0.0:
            pat, vals = _drop_small(pat, vals, j, drop_tol)
        cols_idx.append(pat.astype(np.int32))
        cols_val.append(vals)
        x[pat] = 0.0
        mark[pat] = False
    indptr, indices, data = _assemble_csc(n, cols_idx, cols_val)
    return InverseFactor(kind="lower", layout="csc", n=n, indptr=indptr, indices=indices, data=data)


def invert_upper(u: TriangularFactor, drop_tol: float = 0.0) -> InverseFactor:
    """Rows of U^-1, stored row-major.

    Column j of U^-1 is obtained by the backward solve U x = e_j over
    the structurally reachable rows at or above j; the assembled
    columns are then transposed into row-major storage.
    """
    if u.kind != "upper":
        raise ParameterError("invert_upper requires an upper factor")
    n = u.n
    diag = np.zeros(n)
    subs = [u.column(j) for j in range(n)]
    for j in range(n):
        rows, vals = subs[j]
        if rows.size == 0 or rows[-1] != j or abs(vals[-1]) <= PIVOT_EPS:
            raise FactorizationError(f"zero or missing diagonal at column {j}")
        diag[j] = vals[-1]
    sup_idx = [s[0][:-1] for s in subs]  # strictly-upper rows per column
    sup_val = [s[1][:-1] for s in subs]
    x = np.zeros(n)
    mark = np.zeros(n, dtype=bool)
    cols_idx: list[np.ndarray] = []
    cols_val: list[np.ndarray] = []
    for j in range(n):
        x[j] = 1.0
        mark[j] = True
        for k in range(j, -1, -1):
            if mark[k]:
                x[k] /= diag[k]
                ui = sup_idx[k]
                if ui.size:
                    x[ui] -= sup_val[k] * x[k]
                    mark[ui] = True
        pat = np.nonzero(mark[: j + 1])[0]
        vals = x[pat].copy()
        if drop_tol > 0.0:
            pat, vals = _drop_small(pat, vals, j, drop_tol)
        cols_idx.append(pat.astype(np.int32))
        cols_val.append(vals)
        x[pat] = 0.0
        mark[pat] = False
    indptr, indices, data = _assemble_csc(n, cols_idx, cols_val)
    csr = sp.csc_matrix((data, indices, indptr), shape=(n, n)).tocsr()
    csr.sort_indices()
    return InverseFactor(
        kind="upper",
        layout="csr",
        n=n,
        indptr=csr.indptr.astype(np.int64),
        indices=csr.indices.astype(np.int32),
        data=csr.data,
    )
