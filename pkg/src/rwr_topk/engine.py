"""Proximity computation: iterative oracle and inverse-factor lookups.

The iterative fixed point is the ground truth used by tests and the
``oracle`` CLI subcommand.  The production path reads one column of
L^-1 per query and one row of U^-1 per requested node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UnknownNodeError
from .graph import NormalizedMatrix

__all__ = [
    "ProximityVector",
    "QueryWorkspace",
    "iterative_rwr",
    "prepare_query",
    "proximity_of",
    "full_vector",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class ProximityVector:
    n: int
    values: np.ndarray
    query: int
    converged: bool
    iterations: int

    def topk(self, k: int) -> list[tuple[int, float]]:
        """K highest proximities, ties broken by ascending node id."""
        order = np.lexsort((np.arange(self.n), -self.values))
        return [(int(u), float(self.values[u])) for u in order[:k]]


@dataclass
class QueryWorkspace:
    """Dense c * L^-1 e_perm(q), reusable for every lookup of one query."""

    y: np.ndarray
    populated_for: int


def iterative_rwr(
    a: NormalizedMatrix,
    q: int,
    c: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ProximityVector:
    """Fixed-point iteration p <- (1-c) A p + c e_q from p = e_q."""
    if not (0 <= q < a.n):
        raise UnknownNodeError(f"node id {q} outside [0, {a.n})")
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    mat = a.to_scipy()
    p = np.zeros(a.n)
    p[q] = 1.0
    restart = np.zeros(a.n)
    restart[q] = c
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        p_new = (1.0 - c) * (mat @ p) + restart
        delta = float(np.max(np.abs(p_new - p))) if a.n else 0.0
        p = p_new
        if delta <= tol:
            converged = True
            break
    return ProximityVector(n=a.n, values=p, query=q, converged=converged, iterations=it)


def prepare_query(idx, q: int) -> QueryWorkspace:
    """Materialize y = c * (column perm(q) of L^-1) as a dense vector."""
    if not (0 <= q < idx.n):
        raise UnknownNodeError(f"node id {q} outside [0, {idx.n})")
    pos = int(idx.ordering.perm[q])
    linv = idx.linv
    s, e = linv.indptr[pos], linv.indptr[pos + 1]
    y = np.zeros(idx.n)
    y[linv.indices[s:e]] = idx.c * linv.data[s:e]
    return QueryWorkspace(y=y, populated_for=q)


def proximity_of(idx, ws: QueryWorkspace, u: int) -> float:
    """Exact proximity of u: sparse row perm(u) of U^-1 dotted with y."""
    if not (0 <= u < idx.n):
        raise UnknownNodeError(f"node id {u} outside [0, {idx.n})")
    pos = int(idx.ordering.perm[u])
    uinv = idx.uinv
    s, e = uinv.indptr[pos], uinv.indptr[pos + 1]
    return float(uinv.data[s:e] @ ws.y[uinv.indices[s:e]])


def full_vector(idx, q: int) -> ProximityVector:
    """Proximity of every node; the no-pruning baseline path."""
    ws = prepare_query(idx, q)
    values = np.array([proximity_of(idx, ws, u) for u in range(idx.n)])
    return ProximityVector(n=idx.n, values=values, query=q, converged=True, iterations=0)
