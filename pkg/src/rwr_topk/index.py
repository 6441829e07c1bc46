"""Precompute pipeline and the on-disk index container.

Format: little-endian binary, magic ``KDSH``, one version byte, CRC32
of the payload in the header, and length-prefixed sections.  Node ids
are 32-bit (n < 2**31), values are 64-bit floats.  The normalized
adjacency is stored alongside the inverse factors so a query needs
nothing but the index file.
"""

from __future__ import annotations

import json
import struct
import time
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IndexFormatError, ParameterError, UnknownNodeError
from .graph import Graph, NormalizedMatrix, Ordering, apply_ordering, column_normalize
from .lu import InverseFactor, build_system, crout_lu, invert_lower, invert_upper
from .reorder import (
    Partitioning,
    cluster_reorder,
    degree_reorder,
    hybrid_reorder,
    random_reorder,
)

__all__ = ["ProximityIndex", "PrecomputeStats", "precompute", "save_index", "load_index"]

MAGIC = b"KDSH"
VERSION = 1
STRATEGIES = ("degree", "cluster", "hybrid", "random")
_HEADER = struct.Struct("<4sBBHIQdiQQI")  # magic ver tag pad n m c kappa nnzL nnzU crc


@dataclass(frozen=True)
class ProximityIndex:
    """Everything a query needs: permutation, bound data, inverse factors."""

    n: int
    m: int
    c: float
    strategy: str
    kappa: int  # -1 when the strategy has no partitioning
    ordering: Ordering
    matrix: NormalizedMatrix  # original id space
    col_max: np.ndarray
    global_max: float
    diag: np.ndarray  # self-loop probability per original node
    linv: InverseFactor
    uinv: InverseFactor
    labels: list[str]

    @property
    def nnz(self) -> int:
        return self.linv.nnz + self.uinv.nnz

    def node_id(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownNodeError(f"unknown node label {label!r}") from None

    def label_map(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}


@dataclass(frozen=True)
class PrecomputeStats:
    n: int
    m: int
    kappa: int
    nnz_linv: int
    nnz_uinv: int
    nnz_ratio: float
    seconds: float


def _make_ordering(g: Graph, strategy: str, seed: int = 0):
    if strategy == "degree":
        return degree_reorder(g), None
    if strategy == "cluster":
        return cluster_reorder(g)
    if strategy == "hybrid":
        return hybrid_reorder(g)
    if strategy == "random":
        return random_reorder(g, seed), None
    raise ParameterError(f"unknown ordering strategy {strategy!r}")


def precompute(
    g: Graph,
    c: float = 0.95,
    strategy: str = "hybrid",
    drop_tol: float = 0.0,
    seed: int = 0,
) -> tuple[ProximityIndex, PrecomputeStats]:
    """Reorder, factor, and invert; returns the index plus build stats."""
    t0 = time.perf_counter()
    a = column_normalize(g)
    ordering, part = _make_ordering(g, strategy, seed)
    a_perm = apply_ordering(a, ordering)
    w = build_system(a_perm, c)
    lo, up = crout_lu(w, drop_tol=drop_tol)
    linv = invert_lower(lo, drop_tol=drop_tol)
    uinv = invert_upper(up, drop_tol=drop_tol)
    idx = ProximityIndex(
        n=g.n,
        m=g.m,
        c=c,
        strategy=strategy,
        kappa=part.kappa if isinstance(part, Partitioning) else -1,
        ordering=ordering,
        matrix=a,
        col_max=a.col_max,
        global_max=a.global_max,
        diag=a.diagonal(),
        linv=linv,
        uinv=uinv,
        labels=g.labels,
    )
    stats = PrecomputeStats(
        n=g.n,
        m=g.m,
        kappa=idx.kappa,
        nnz_linv=linv.nnz,
        nnz_uinv=uinv.nnz,
        nnz_ratio=(linv.nnz + uinv.nnz) / g.m if g.m else float("nan"),
        seconds=time.perf_counter() - t0,
    )
    return idx, stats


def _section(arr: np.ndarray) -> bytes:
    raw = np.ascontiguousarray(arr).tobytes()
    return struct.pack("<Q", len(raw)) + raw


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def section(self, dtype) -> np.ndarray:
        if self.pos + 8 > len(self.buf):
            raise IndexFormatError("truncated index payload")
        (length,) = struct.unpack_from("<Q", self.buf, self.pos)
        self.pos += 8
        end = self.pos + length
        if end > len(self.buf):
            raise IndexFormatError("truncated index payload")
        arr = np.frombuffer(self.buf[self.pos:end], dtype=dtype).copy()
        self.pos = end
        return arr


def save_index(idx: ProximityIndex, path) -> None:
    payload = b"".join(
        [
            _section(idx.ordering.perm.astype("<i4")),
            _section(idx.col_max.astype("<f8")),
            _section(np.array([idx.global_max], dtype="<f8")),
            _section(idx.diag.astype("<f8")),
            _section(idx.matrix.indptr.astype("<i8")),
            _section(idx.matrix.indices.astype("<i4")),
            _section(idx.matrix.data.astype("<f8")),
            _section(idx.linv.indptr.astype("<i8")),
            _section(idx.linv.indices.astype("<i4")),
            _section(idx.linv.data.astype("<f8")),
            _section(idx.uinv.indptr.astype("<i8")),
            _section(idx.uinv.indices.astype("<i4")),
            _section(idx.uinv.data.astype("<f8")),
            _section(np.frombuffer(json.dumps(idx.labels).encode("utf-8"), dtype=np.uint8)),
        ]
    )
    if idx.n >= 2**31:
        raise ParameterError("node count exceeds 32-bit id space")
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        STRATEGIES.index(idx.strategy),
        0,
        idx.n,
        idx.m,
        idx.c,
        idx.kappa,
        idx.linv.nnz,
        idx.uinv.nnz,
        zlib.crc32(payload) & 0xFFFFFFFF,
    )
    Path(path).write_bytes(header + payload)


def load_index(path) -> ProximityIndex:
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise IndexFormatError("file too short for an index header")
    magic, version, tag, _pad, n, m, c, kappa, nnz_l, nnz_u, crc = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    if tag >= len(STRATEGIES):
        raise IndexFormatError(f"unknown strategy tag {tag}")
    payload = blob[_HEADER.size:]
    if (zlib.crc32(payload) & 0xFFFFFFFF) != crc:
        raise IndexFormatError("payload checksum mismatch")
    r = _Reader(payload)
    perm = r.section("<i4").astype(np.int64)
    col_max = r.section("<f8")
    global_max = float(r.section("<f8")[0])
    diag = r.section("<f8")
    a_indptr = r.section("<i8")
    a_indices = r.section("<i4")
    a_data = r.section("<f8")
    l_indptr = r.section("<i8")
    l_indices = r.section("<i4")
    l_data = r.section("<f8")
    u_indptr = r.section("<i8")
    u_indices = r.section("<i4")
    u_data = r.section("<f8")
    labels = json.loads(r.section(np.uint8).tobytes().decode("utf-8"))
    if perm.size != n or col_max.size != n or diag.size != n or len(labels) != n:
        raise IndexFormatError("section sizes disagree with header node count")
    if l_indices.size != nnz_l or u_indices.size != nnz_u:
        raise IndexFormatError("inverse-factor nnz disagrees with header")
    matrix = NormalizedMatrix(
        n=n,
        indptr=a_indptr,
        indices=a_indices,
        data=a_data,
        col_max=col_max,
        global_max=global_max,
    )
    return ProximityIndex(
        n=n,
        m=m,
        c=c,
        strategy=STRATEGIES[tag],
        kappa=kappa,
        ordering=_ordering_from_perm(perm),
        matrix=matrix,
        col_max=col_max,
        global_max=global_max,
        diag=diag,
        linv=InverseFactor(kind="lower", layout="csc", n=n, indptr=l_indptr, indices=l_indices, data=l_data),
        uinv=InverseFactor(kind="upper", layout="csr", n=n, indptr=u_indptr, indices=u_indices, data=u_data),
        labels=labels,
    )


def _ordering_from_perm(perm: np.ndarray) -> Ordering:
    inv_perm = np.empty_like(perm)
    inv_perm[perm] = np.arange(perm.size)
    return Ordering(perm=perm, inv_perm=inv_perm)
